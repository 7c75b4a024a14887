#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace relml {

using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ClassId = int;

enum class AttributeKind { Numerical, Categorical };

const char* to_string(AttributeKind kind);
AttributeKind parse_attribute_kind(std::string_view text);

/// Rows of real-valued features keyed by unique entity ids, with an optional
/// class label per entity.
class EntityTable {
 public:
  EntityTable(std::string name, std::vector<std::string> ids, FeatureMatrix features,
              std::optional<std::vector<ClassId>> labels = std::nullopt,
              std::vector<std::string> feature_names = {},
              std::vector<std::string> class_names = {});

  const std::string& name() const { return name_; }
  std::size_t size() const { return ids_.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(features_.cols()); }

  const std::vector<std::string>& ids() const { return ids_; }
  const std::string& id(std::size_t row) const { return ids_.at(row); }
  const FeatureMatrix& features() const { return features_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }

  bool has_labels() const { return labels_.has_value(); }
  /// Throws NoLabels when the table has no label column.
  const std::vector<ClassId>& labels() const;
  const std::vector<std::string>& class_names() const { return class_names_; }
  std::size_t class_count() const;

  std::optional<std::size_t> find(const std::string& key) const;
  /// Throws UnknownEntity.
  std::size_t index_of(const std::string& key) const;

 private:
  std::string name_;
  std::vector<std::string> ids_;
  FeatureMatrix features_;
  std::optional<std::vector<ClassId>> labels_;
  std::vector<std::string> feature_names_;
  std::vector<std::string> class_names_;
  std::unordered_map<std::string, std::size_t> lookup_;
};

/// Many-to-many link table between a parent and a child entity table. Each
/// row carries alpha numeric values (NaN when missing) and beta categorical
/// values, dictionary-encoded per column (-1 when missing).
class AssociationTable {
 public:
  static constexpr std::int32_t kMissingCategory = -1;

  AssociationTable(std::string name, std::string parent_table, std::string child_table,
                   std::vector<std::string> numeric_names,
                   std::vector<std::string> categorical_names);

  /// Appends a row. When the (parent, child) link already exists the first
  /// row is kept and false is returned. Categorical values are trimmed; an
  /// empty value counts as missing.
  bool add_row(std::size_t parent, std::size_t child, std::span<const double> numeric,
               std::span<const std::string> categorical);

  const std::string& name() const { return name_; }
  const std::string& parent_table() const { return parent_table_; }
  const std::string& child_table() const { return child_table_; }

  std::size_t alpha() const { return numeric_names_.size(); }
  std::size_t beta() const { return categorical_names_.size(); }
  std::size_t size() const { return parents_.size(); }

  const std::vector<std::string>& numeric_names() const { return numeric_names_; }
  const std::vector<std::string>& categorical_names() const { return categorical_names_; }

  std::size_t parent(std::size_t row) const { return parents_[row]; }
  std::size_t child(std::size_t row) const { return children_[row]; }
  double numeric(std::size_t row, std::size_t m) const { return numeric_[row * alpha() + m]; }
  std::int32_t category(std::size_t row, std::size_t m) const {
    return categorical_[row * beta() + m];
  }
  /// Original text of a categorical code.
  const std::string& category_label(std::size_t m, std::int32_t code) const;

  /// Same rows with the parent and child roles exchanged.
  AssociationTable reversed() const;

  /// Rows whose child is in `keep`, in original order.
  AssociationTable restricted_to_children(std::span<const std::size_t> keep) const;

  friend AssociationTable normalize_association_numerics(const AssociationTable& assoc);

 private:
  std::string name_;
  std::string parent_table_;
  std::string child_table_;
  std::vector<std::string> numeric_names_;
  std::vector<std::string> categorical_names_;
  std::vector<std::size_t> parents_;
  std::vector<std::size_t> children_;
  std::vector<double> numeric_;
  std::vector<std::int32_t> categorical_;
  std::vector<std::vector<std::string>> dictionaries_;
  std::vector<std::unordered_map<std::string, std::int32_t>> codes_;
  std::unordered_set<std::uint64_t> links_;
};

/// Min-max scales every numeric association column into [0, 1] over all
/// rows. Constant columns map to 0; missing values stay missing.
AssociationTable normalize_association_numerics(const AssociationTable& assoc);

/// Entity tables plus the single association table linking two of them.
struct RelationalSchema {
  std::vector<EntityTable> entities;
  AssociationTable association;

  const EntityTable& table(const std::string& name) const;
  const EntityTable& parent_table() const { return table(association.parent_table()); }
  const EntityTable& child_table() const { return table(association.child_table()); }

  /// Copy in which `target` plays the child role of the association.
  RelationalSchema oriented_toward(const std::string& target) const;

  /// Throws DanglingForeignKey if any association row points outside its tables.
  void validate() const;
};

}  // namespace relml
