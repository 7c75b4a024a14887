#include "relml/access_audit.hpp"

#include <algorithm>

#include "relml/error.hpp"

namespace relml {

AccessRecorder::AccessRecorder(std::size_t n_entities)
    : n_(n_entities), flags_(new std::atomic<unsigned char>[n_entities]) {
  for (std::size_t i = 0; i < n_; ++i) flags_[i].store(0, std::memory_order_relaxed);
}

void AccessRecorder::record(std::size_t id) {
  if (id < n_) flags_[id].store(1, std::memory_order_relaxed);
}

bool AccessRecorder::touched(std::size_t id) const {
  return id < n_ && flags_[id].load(std::memory_order_relaxed) != 0;
}

std::vector<std::size_t> AccessRecorder::touched_ids() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n_; ++i)
    if (touched(i)) out.push_back(i);
  return out;
}

void AccessAudit::reset(std::size_t n_entities, std::size_t folds) {
  recorders_.clear();
  held_out_.assign(folds, {});
  for (std::size_t f = 0; f < folds; ++f)
    recorders_.push_back(std::make_unique<AccessRecorder>(n_entities));
}

void AccessAudit::set_held_out(std::size_t fold, std::span<const std::size_t> ids) {
  if (fold >= held_out_.size()) throw Error(ErrorCode::InvalidArgument, "fold out of range");
  held_out_[fold].assign(ids.begin(), ids.end());
}

AccessRecorder& AccessAudit::recorder(std::size_t fold) { return *recorders_.at(fold); }
const AccessRecorder& AccessAudit::recorder(std::size_t fold) const {
  return *recorders_.at(fold);
}

std::size_t AccessAudit::violations(std::size_t fold) const {
  const auto& rec = *recorders_.at(fold);
  return static_cast<std::size_t>(std::count_if(
      held_out_[fold].begin(), held_out_[fold].end(),
      [&](std::size_t id) { return rec.touched(id); }));
}

std::size_t AccessAudit::violations() const {
  std::size_t total = 0;
  for (std::size_t f = 0; f < recorders_.size(); ++f) total += violations(f);
  return total;
}

}  // namespace relml
