#include "layoutsearch/context_key.hpp"

#include <algorithm>

#include "layoutsearch/error.hpp"

namespace layoutsearch {

ContextKey context_key(const LayoutGraph& graph, BlockId block) {
  if (block >= graph.size()) {
    throw InvalidInput("unknown block id " + std::to_string(block) + " in " + graph.doc_id);
  }
  const Block& b = graph.blocks[block];
  ContextKey key;
  key.kind = static_cast<std::uint8_t>(b.kind);
  key.location = static_cast<std::uint8_t>(b.location);
  for (Direction d : kDirections) {
    const auto i = static_cast<std::size_t>(d);
    key.counts[i] = static_cast<std::uint8_t>(
        std::min<std::size_t>(graph.neighbors[block][i].size(), kMaxNeighborCount));
    if (graph.overlaps[block][i]) key.overlap_bits |= static_cast<std::uint8_t>(1u << i);
  }
  return key;
}

std::uint32_t encode(const ContextKey& key) {
  std::uint32_t k = key.kind;
  k = k * 5 + key.location;
  for (auto c : key.counts) k = k * 8 + c;
  return k * 16 + key.overlap_bits;
}

ContextKey decode(std::uint32_t k) {
  ContextKey key;
  key.overlap_bits = static_cast<std::uint8_t>(k % 16);
  k /= 16;
  for (int i = 3; i >= 0; --i) {
    key.counts[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(k % 8);
    k /= 8;
  }
  key.location = static_cast<std::uint8_t>(k % 5);
  key.kind = static_cast<std::uint8_t>(k / 5);
  return key;
}

}  // namespace layoutsearch
