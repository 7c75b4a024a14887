#pragma once

#include "relml/access_audit.hpp"
#include "relml/schema.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace relml {

struct ParentLink {
  std::size_t parent;
  std::size_t row;  ///< association row linking parent -> child
};

/// A parent shared by children i and j with the association row to each.
struct CommonParent {
  std::size_t parent;
  std::size_t row_i;
  std::size_t row_j;

  bool operator==(const CommonParent&) const = default;
};

/// Parent lists per child, sorted by parent id, answering common-parent
/// queries lazily by merging two lists. Immutable once built. The index keeps
/// a reference to the association table, which must outlive it.
class ParentIndex {
 public:
  /// Indexes every child in [0, n_children).
  ParentIndex(const AssociationTable& assoc, std::size_t n_children,
              AccessRecorder* recorder = nullptr);

  /// Indexes only the listed children; the others behave as if they had no
  /// association rows.
  ParentIndex(const AssociationTable& assoc, std::size_t n_children,
              std::span<const std::size_t> include, AccessRecorder* recorder = nullptr);

  std::size_t n_children() const { return lists_.size(); }
  const AssociationTable& association() const { return *assoc_; }

  std::span<const ParentLink> parents_of(std::size_t child) const;

  /// Parents shared by i and j, ascending by parent id. Throws UnknownEntity
  /// for out-of-range ids and InvalidArgument when i == j.
  std::vector<CommonParent> common_parents(std::size_t i, std::size_t j) const;
  std::size_t common_parent_count(std::size_t i, std::size_t j) const;
  bool shares_parent(std::size_t i, std::size_t j) const;

 private:
  void check_pair(std::size_t i, std::size_t j) const;

  const AssociationTable* assoc_;
  std::vector<std::vector<ParentLink>> lists_;
  AccessRecorder* recorder_;
};

}  // namespace relml
