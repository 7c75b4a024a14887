#pragma once

#include <cstddef>
#include <functional>
#include <utility>

namespace relml {

/// Unordered pair of distinct entity ids, stored with a < b.
struct EntityPair {
  std::size_t a = 0;
  std::size_t b = 0;

  EntityPair() = default;
  EntityPair(std::size_t x, std::size_t y) : a(x < y ? x : y), b(x < y ? y : x) {}

  bool contains(std::size_t id) const { return a == id || b == id; }
  /// The member that is not `id`; `id` must be a member.
  std::size_t other(std::size_t id) const { return a == id ? b : a; }

  auto operator<=>(const EntityPair&) const = default;
};

struct EntityPairHash {
  std::size_t operator()(const EntityPair& p) const noexcept {
    return std::hash<std::size_t>{}(p.a * 0x9e3779b97f4a7c15ULL ^ p.b);
  }
};

}  // namespace relml
