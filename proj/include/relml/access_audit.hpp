#pragma once

#include <atomic>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace relml {

/// Thread-safe record of which entity ids a computation has read.
class AccessRecorder {
 public:
  explicit AccessRecorder(std::size_t n_entities);

  void record(std::size_t id);
  bool touched(std::size_t id) const;
  std::vector<std::size_t> touched_ids() const;
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  std::unique_ptr<std::atomic<unsigned char>[]> flags_;
};

/// Per-fold access records for cross-validation, plus the held-out ids of
/// each fold. A violation is a held-out id that was read while fitting the
/// fold it is held out from.
class AccessAudit {
 public:
  AccessAudit() = default;

  void reset(std::size_t n_entities, std::size_t folds);
  void set_held_out(std::size_t fold, std::span<const std::size_t> ids);

  AccessRecorder& recorder(std::size_t fold);
  const AccessRecorder& recorder(std::size_t fold) const;

  std::size_t folds() const { return recorders_.size(); }
  std::size_t violations() const;
  std::size_t violations(std::size_t fold) const;

 private:
  std::vector<std::unique_ptr<AccessRecorder>> recorders_;
  std::vector<std::vector<std::size_t>> held_out_;
};

}  // namespace relml
