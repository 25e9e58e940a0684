#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "layoutsearch/layout_graph.hpp"

namespace layoutsearch {

inline constexpr std::uint32_t kMaxNeighborCount = 7;
// 2 kinds x 5 locations x 8^4 counts x 2^4 overlap bits.
inline constexpr std::uint32_t kKeySpace = 2u * 5u * 8u * 8u * 8u * 8u * 16u;

// Fixed-length descriptor of a block and its neighborhood. Counts and overlap
// bits are indexed by Direction (top, bottom, left, right); overlap bit d is
// (1 << d).
struct ContextKey {
  std::uint8_t kind = 0;      // 0 text, 1 nontext
  std::uint8_t location = 0;  // Location code 0..4
  std::array<std::uint8_t, 4> counts{};
  std::uint8_t overlap_bits = 0;

  bool operator==(const ContextKey&) const = default;
};

ContextKey context_key(const LayoutGraph& graph, BlockId block);

// Mixed-radix code in [0, kKeySpace).
std::uint32_t encode(const ContextKey& key);
ContextKey decode(std::uint32_t k);

inline std::size_t hash_key(std::uint64_t k, std::size_t bins) { return static_cast<std::size_t>(k % bins); }

}  // namespace layoutsearch
