#include "relml/schema.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "relml/error.hpp"

namespace relml {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::uint64_t link_key(std::size_t parent, std::size_t child) {
  return (static_cast<std::uint64_t>(parent) << 32) ^ static_cast<std::uint64_t>(child);
}

}  // namespace

const char* to_string(AttributeKind kind) {
  return kind == AttributeKind::Numerical ? "numerical" : "categorical";
}

AttributeKind parse_attribute_kind(std::string_view text) {
  if (text == "numerical" || text == "numeric") return AttributeKind::Numerical;
  if (text == "categorical") return AttributeKind::Categorical;
  throw Error(ErrorCode::MalformedInput, "unknown attribute kind '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------

EntityTable::EntityTable(std::string name, std::vector<std::string> ids, FeatureMatrix features,
                         std::optional<std::vector<ClassId>> labels,
                         std::vector<std::string> feature_names,
                         std::vector<std::string> class_names)
    : name_(std::move(name)),
      ids_(std::move(ids)),
      features_(std::move(features)),
      labels_(std::move(labels)),
      feature_names_(std::move(feature_names)),
      class_names_(std::move(class_names)) {
  if (static_cast<std::size_t>(features_.rows()) != ids_.size())
    throw Error(ErrorCode::MalformedInput,
                "table '" + name_ + "': feature rows do not match id count");
  if (features_.cols() < 1)
    throw Error(ErrorCode::MalformedInput, "table '" + name_ + "' has no feature columns");
  if (labels_ && labels_->size() != ids_.size())
    throw Error(ErrorCode::MalformedInput, "table '" + name_ + "': label count mismatch");
  if (labels_) {
    for (ClassId c : *labels_)
      if (c < 0) throw Error(ErrorCode::MalformedInput, "table '" + name_ + "': negative label");
  }
  if (feature_names_.empty()) {
    for (Eigen::Index c = 0; c < features_.cols(); ++c)
      feature_names_.push_back("f" + std::to_string(c));
  }
  lookup_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!lookup_.emplace(ids_[i], i).second)
      throw Error(ErrorCode::DuplicateEntityId,
                  "table '" + name_ + "' has duplicate id '" + ids_[i] + "'");
  }
  if (labels_ && class_names_.empty()) {
    const ClassId max_label = labels_->empty() ? -1 : *std::max_element(labels_->begin(), labels_->end());
    for (ClassId c = 0; c <= max_label; ++c) class_names_.push_back(std::to_string(c));
  }
}

const std::vector<ClassId>& EntityTable::labels() const {
  if (!labels_) throw Error(ErrorCode::NoLabels, "table '" + name_ + "' has no label column");
  return *labels_;
}

std::size_t EntityTable::class_count() const {
  if (!labels_) return 0;
  return std::set<ClassId>(labels_->begin(), labels_->end()).size();
}

std::optional<std::size_t> EntityTable::find(const std::string& key) const {
  auto it = lookup_.find(key);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::size_t EntityTable::index_of(const std::string& key) const {
  auto found = find(key);
  if (!found) throw Error(ErrorCode::UnknownEntity, "no entity '" + key + "' in table '" + name_ + "'");
  return *found;
}

// ---------------------------------------------------------------------------

AssociationTable::AssociationTable(std::string name, std::string parent_table,
                                   std::string child_table,
                                   std::vector<std::string> numeric_names,
                                   std::vector<std::string> categorical_names)
    : name_(std::move(name)),
      parent_table_(std::move(parent_table)),
      child_table_(std::move(child_table)),
      numeric_names_(std::move(numeric_names)),
      categorical_names_(std::move(categorical_names)),
      dictionaries_(categorical_names_.size()),
      codes_(categorical_names_.size()) {
  if (numeric_names_.empty() && categorical_names_.empty())
    throw Error(ErrorCode::NoAssociationAttributes,
                "association '" + name_ + "' declares no attributes");
}

bool AssociationTable::add_row(std::size_t parent, std::size_t child,
                               std::span<const double> numeric,
                               std::span<const std::string> categorical) {
  if (numeric.size() != alpha() || categorical.size() != beta())
    throw Error(ErrorCode::MalformedInput, "association '" + name_ + "': wrong attribute count");
  if (!links_.insert(link_key(parent, child)).second) return false;
  parents_.push_back(parent);
  children_.push_back(child);
  numeric_.insert(numeric_.end(), numeric.begin(), numeric.end());
  for (std::size_t m = 0; m < beta(); ++m) {
    const std::string value = trim(categorical[m]);
    if (value.empty()) {
      categorical_.push_back(kMissingCategory);
      continue;
    }
    auto [it, inserted] = codes_[m].emplace(value, static_cast<std::int32_t>(dictionaries_[m].size()));
    if (inserted) dictionaries_[m].push_back(value);
    categorical_.push_back(it->second);
  }
  return true;
}

const std::string& AssociationTable::category_label(std::size_t m, std::int32_t code) const {
  static const std::string missing = "<missing>";
  if (code == kMissingCategory) return missing;
  return dictionaries_.at(m).at(static_cast<std::size_t>(code));
}

AssociationTable AssociationTable::reversed() const {
  AssociationTable out = *this;
  std::swap(out.parent_table_, out.child_table_);
  std::swap(out.parents_, out.children_);
  out.links_.clear();
  for (std::size_t r = 0; r < out.size(); ++r) out.links_.insert(link_key(out.parents_[r], out.children_[r]));
  return out;
}

AssociationTable AssociationTable::restricted_to_children(std::span<const std::size_t> keep) const {
  std::unordered_set<std::size_t> wanted(keep.begin(), keep.end());
  AssociationTable out(name_, parent_table_, child_table_, numeric_names_, categorical_names_);
  out.dictionaries_ = dictionaries_;
  out.codes_ = codes_;
  for (std::size_t r = 0; r < size(); ++r) {
    if (!wanted.count(children_[r])) continue;
    out.parents_.push_back(parents_[r]);
    out.children_.push_back(children_[r]);
    out.links_.insert(link_key(parents_[r], children_[r]));
    for (std::size_t m = 0; m < alpha(); ++m) out.numeric_.push_back(numeric(r, m));
    for (std::size_t m = 0; m < beta(); ++m) out.categorical_.push_back(category(r, m));
  }
  return out;
}

AssociationTable normalize_association_numerics(const AssociationTable& assoc) {
  AssociationTable out = assoc;
  const std::size_t a = assoc.alpha();
  for (std::size_t m = 0; m < a; ++m) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < assoc.size(); ++r) {
      const double v = assoc.numeric(r, m);
      if (std::isnan(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double range = hi - lo;
    for (std::size_t r = 0; r < assoc.size(); ++r) {
      double& v = out.numeric_[r * a + m];
      if (std::isnan(v)) continue;
      v = range > 0.0 ? (v - lo) / range : 0.0;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

const EntityTable& RelationalSchema::table(const std::string& name) const {
  for (const auto& t : entities)
    if (t.name() == name) return t;
  throw Error(ErrorCode::UnknownColumn, "schema has no table '" + name + "'");
}

RelationalSchema RelationalSchema::oriented_toward(const std::string& target) const {
  if (association.child_table() == target) return *this;
  if (association.parent_table() == target)
    return RelationalSchema{entities, association.reversed()};
  throw Error(ErrorCode::UnknownColumn,
              "table '" + target + "' does not take part in association '" + association.name() + "'");
}

void RelationalSchema::validate() const {
  const auto& parents = parent_table();
  const auto& children = child_table();
  for (std::size_t r = 0; r < association.size(); ++r) {
    if (association.parent(r) >= parents.size() || association.child(r) >= children.size())
      throw Error(ErrorCode::DanglingForeignKey,
                  "association row " + std::to_string(r) + " references a missing entity");
  }
}

}  // namespace relml
