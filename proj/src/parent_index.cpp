#include "relml/parent_index.hpp"

#include <algorithm>
#include <string>

#include "relml/error.hpp"

namespace relml {

ParentIndex::ParentIndex(const AssociationTable& assoc, std::size_t n_children,
                         AccessRecorder* recorder)
    : assoc_(&assoc), lists_(n_children), recorder_(recorder) {
  for (std::size_t r = 0; r < assoc.size(); ++r) {
    const std::size_t child = assoc.child(r);
    if (child >= n_children)
      throw Error(ErrorCode::DanglingForeignKey,
                  "association row " + std::to_string(r) + " references child " + std::to_string(child));
    lists_[child].push_back({assoc.parent(r), r});
  }
  for (auto& list : lists_)
    std::sort(list.begin(), list.end(),
              [](const ParentLink& a, const ParentLink& b) { return a.parent < b.parent; });
}

ParentIndex::ParentIndex(const AssociationTable& assoc, std::size_t n_children,
                         std::span<const std::size_t> include, AccessRecorder* recorder)
    : ParentIndex(assoc, n_children, recorder) {
  std::vector<char> keep(n_children, 0);
  for (std::size_t id : include) {
    if (id >= n_children) throw Error(ErrorCode::UnknownEntity, "child " + std::to_string(id));
    keep[id] = 1;
  }
  for (std::size_t c = 0; c < n_children; ++c)
    if (!keep[c]) lists_[c].clear();
}

void ParentIndex::check_pair(std::size_t i, std::size_t j) const {
  if (i >= lists_.size() || j >= lists_.size())
    throw Error(ErrorCode::UnknownEntity,
                "child pair (" + std::to_string(i) + ", " + std::to_string(j) + ") out of range");
  if (i == j) throw Error(ErrorCode::InvalidArgument, "common parents need two distinct children");
}

std::span<const ParentLink> ParentIndex::parents_of(std::size_t child) const {
  if (child >= lists_.size())
    throw Error(ErrorCode::UnknownEntity, "child " + std::to_string(child) + " out of range");
  if (recorder_) recorder_->record(child);
  return lists_[child];
}

std::vector<CommonParent> ParentIndex::common_parents(std::size_t i, std::size_t j) const {
  check_pair(i, j);
  const auto a = parents_of(i);
  const auto b = parents_of(j);
  std::vector<CommonParent> out;
  std::size_t x = 0, y = 0;
  while (x < a.size() && y < b.size()) {
    if (a[x].parent < b[y].parent) {
      ++x;
    } else if (b[y].parent < a[x].parent) {
      ++y;
    } else {
      out.push_back({a[x].parent, a[x].row, b[y].row});
      ++x;
      ++y;
    }
  }
  return out;
}

std::size_t ParentIndex::common_parent_count(std::size_t i, std::size_t j) const {
  check_pair(i, j);
  const auto a = parents_of(i);
  const auto b = parents_of(j);
  std::size_t count = 0, x = 0, y = 0;
  while (x < a.size() && y < b.size()) {
    if (a[x].parent < b[y].parent) ++x;
    else if (b[y].parent < a[x].parent) ++y;
    else { ++count; ++x; ++y; }
  }
  return count;
}

bool ParentIndex::shares_parent(std::size_t i, std::size_t j) const {
  check_pair(i, j);
  const auto a = parents_of(i);
  const auto b = parents_of(j);
  std::size_t x = 0, y = 0;
  while (x < a.size() && y < b.size()) {
    if (a[x].parent < b[y].parent) ++x;
    else if (b[y].parent < a[x].parent) ++y;
    else return true;
  }
  return false;
}

}  // namespace relml
