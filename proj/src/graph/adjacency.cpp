#include <algorithm>
#include <numeric>
#include <set>

#include "layoutsearch/error.hpp"
#include "layoutsearch/layout_graph.hpp"

namespace layoutsearch {

namespace {

Rect transpose(const Rect& r) { return {r.y, r.x, r.h, r.w}; }

double span_overlap(double a0, double a1, double b0, double b1) {
  return std::min(a1, b1) - std::max(a0, b0);
}

// For every a, the rectangles visible past a along +x. Rectangles are given
// in an orientation where "forward" is increasing x.
std::vector<std::vector<BlockId>> forward_neighbors(std::span<const Rect> rects) {
  const std::size_t n = rects.size();
  std::vector<std::vector<BlockId>> out(n);
  std::vector<std::size_t> candidates;
  for (std::size_t a = 0; a < n; ++a) {
    const Rect& ra = rects[a];
    candidates.clear();
    for (std::size_t c = 0; c < n; ++c) {
      if (c == a) continue;
      const Rect& rc = rects[c];
      if (rc.x >= ra.cx() && span_overlap(ra.y, ra.bottom(), rc.y, rc.bottom()) > 0) {
        candidates.push_back(c);
      }
    }
    for (std::size_t b : candidates) {
      const Rect& rb = rects[b];
      if (ra.right() > rb.cx()) continue;
      const double lo = std::max(ra.y, rb.y);
      const double hi = std::min(ra.bottom(), rb.bottom());
      // Blocked by any in-between rectangle touching the shared interval, or
      // by one on each side of it: a gutter does not open a line of sight.
      bool touched = false;
      bool above = false;
      bool below = false;
      for (std::size_t c : candidates) {
        if (c == b) continue;
        const Rect& rc = rects[c];
        if (rc.right() > rb.cx()) continue;
        if (span_overlap(lo, hi, rc.y, rc.bottom()) > 0) {
          touched = true;
          break;
        }
        above = above || rc.bottom() <= lo;
        below = below || rc.y >= hi;
      }
      if (!touched && !(above && below)) out[a].push_back(static_cast<BlockId>(b));
    }
  }
  return out;
}

}  // namespace

Adjacency compute_adjacency(std::span<const Rect> rects) {
  const std::size_t n = rects.size();
  Adjacency adj;
  adj.neighbors.assign(n, {});
  adj.overlaps.assign(n, {false, false, false, false});

  const auto right = forward_neighbors(rects);
  std::vector<Rect> flipped(rects.begin(), rects.end());
  for (auto& r : flipped) r = transpose(r);
  const auto below = forward_neighbors(flipped);

  auto idx = [](Direction d) { return static_cast<std::size_t>(d); };
  for (std::size_t a = 0; a < n; ++a) {
    for (BlockId b : right[a]) {
      adj.neighbors[a][idx(Direction::Right)].push_back(b);
      adj.neighbors[b][idx(Direction::Left)].push_back(static_cast<BlockId>(a));
    }
    for (BlockId b : below[a]) {
      adj.neighbors[a][idx(Direction::Bottom)].push_back(b);
      adj.neighbors[b][idx(Direction::Top)].push_back(static_cast<BlockId>(a));
    }
  }

  auto by_y = [&](BlockId p, BlockId q) {
    return std::tie(rects[p].y, rects[p].x, p) < std::tie(rects[q].y, rects[q].x, q);
  };
  auto by_x = [&](BlockId p, BlockId q) {
    return std::tie(rects[p].x, rects[p].y, p) < std::tie(rects[q].x, rects[q].y, q);
  };
  for (std::size_t a = 0; a < n; ++a) {
    for (Direction d : kDirections) {
      auto& list = adj.neighbors[a][idx(d)];
      if (d == Direction::Left || d == Direction::Right) {
        std::sort(list.begin(), list.end(), by_y);
      } else {
        std::sort(list.begin(), list.end(), by_x);
      }
      adj.overlaps[a][idx(d)] = std::any_of(list.begin(), list.end(), [&](BlockId b) {
        return intersects(rects[a], rects[b]);
      });
    }
  }
  return adj;
}

LayoutGraph build_adjacency(std::vector<Block> blocks, const PageDims& page) {
  std::set<BlockId> seen;
  for (const auto& b : blocks) {
    if (!seen.insert(b.id).second) {
      throw InvalidInput("duplicate block id " + std::to_string(b.id));
    }
  }
  std::stable_sort(blocks.begin(), blocks.end(), [](const Block& a, const Block& b) {
    return std::tie(a.bbox.y, a.bbox.x, a.bbox.h, a.bbox.w) <
           std::tie(b.bbox.y, b.bbox.x, b.bbox.h, b.bbox.w);
  });

  LayoutGraph g;
  g.page = page;
  std::vector<Rect> rects;
  rects.reserve(blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    blocks[i].id = static_cast<BlockId>(i);
    blocks[i].location = spatial_location(blocks[i].bbox, page);
    rects.push_back(blocks[i].bbox);
  }
  auto adj = compute_adjacency(rects);
  g.blocks = std::move(blocks);
  g.neighbors = std::move(adj.neighbors);
  g.overlaps = std::move(adj.overlaps);
  return g;
}

LayoutGraph graph_from_raw(std::span<const RawBlock> raw, const PageDims& page,
                           double avg_char_height_doc, std::string doc_id) {
  std::vector<Block> blocks;
  blocks.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    Block b;
    b.id = static_cast<BlockId>(i);
    b.bbox = raw[i].bbox;
    b.kind = raw[i].kind;
    b.avg_char_height_block = raw[i].avg_char_height_block;
    blocks.push_back(b);
  }
  LayoutGraph g = build_adjacency(std::move(blocks), page);
  g.doc_id = std::move(doc_id);
  g.avg_char_height_doc = avg_char_height_doc;
  return g;
}

std::vector<RawBlock> to_raw_blocks(const LayoutGraph& graph) {
  std::vector<RawBlock> out;
  out.reserve(graph.blocks.size());
  for (const auto& b : graph.blocks) out.push_back({b.bbox, b.kind, b.avg_char_height_block});
  return out;
}

std::string_view to_string(Hypothesis h) {
  switch (h) {
    case Hypothesis::H1: return "H1";
    case Hypothesis::H2: return "H2";
    case Hypothesis::H3: return "H3";
    case Hypothesis::H4: return "H4";
  }
  return "H1";
}

std::optional<Hypothesis> parse_hypothesis(std::string_view s) {
  for (auto h : kHypotheses) {
    if (to_string(h) == s) return h;
  }
  return std::nullopt;
}

}  // namespace layoutsearch
