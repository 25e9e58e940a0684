#include <algorithm>
#include <cmath>
#include <limits>

#include "layoutsearch/layout_graph.hpp"

namespace layoutsearch {

namespace {

constexpr double kNonTextGapChars = 2.0;    // H3: gap < 2 * ach
constexpr double kCaptionHeightChars = 1.5;  // H4: height <= 1.5 * ach
constexpr double kCaptionGapChars = 1.0;     // H4: within 1 * ach of the non-text block

bool x_aligned(const Rect& a, const Rect& b, double tol) {
  return std::abs(a.x - b.x) <= tol || std::abs(a.right() - b.right()) <= tol ||
         std::abs(a.cx() - b.cx()) <= tol;
}

bool y_aligned(const Rect& a, const Rect& b, double tol) {
  return std::abs(a.y - b.y) <= tol || std::abs(a.bottom() - b.bottom()) <= tol ||
         std::abs(a.cy() - b.cy()) <= tol;
}

LayoutGraph rebuild(const LayoutGraph& like, std::vector<RawBlock> raw) {
  LayoutGraph g = graph_from_raw(raw, like.page, like.avg_char_height_doc, like.doc_id);
  g.hypothesis = like.hypothesis;
  return g;
}

LayoutGraph remove_blocks(const LayoutGraph& graph, const std::vector<bool>& drop) {
  std::vector<RawBlock> kept;
  for (const auto& b : graph.blocks) {
    if (!drop[b.id]) kept.push_back({b.bbox, b.kind, b.avg_char_height_block});
  }
  return rebuild(graph, std::move(kept));
}

// Repeatedly merges disjoint pairs accepted by `mergeable` until none remain.
// Each pass walks pairs in block order and rebuilds adjacency afterwards. A
// merge whose union would overlap any other block is skipped.
template <typename PairTest, typename Merge>
LayoutGraph merge_to_fixpoint(LayoutGraph g, PairTest mergeable, Merge merge) {
  for (;;) {
    std::vector<bool> used(g.size(), false);
    std::vector<RawBlock> next;
    bool any = false;
    for (const auto& a : g.blocks) {
      if (used[a.id]) continue;
      for (Direction d : {Direction::Bottom, Direction::Right}) {
        if (used[a.id]) break;
        for (BlockId bid : g.neighbors_of(a.id, d)) {
          const Block& b = g.blocks[bid];
          if (used[b.id] || !mergeable(a, b, d)) continue;
          RawBlock m = merge(a, b);
          auto hits = [&](const Rect& r) { return intersects(m.bbox, r); };
          bool clear = std::none_of(next.begin(), next.end(), [&](const RawBlock& o) { return hits(o.bbox); });
          for (const auto& c : g.blocks) clear = clear && (c.id == a.id || c.id == b.id || !hits(c.bbox));
          if (!clear) continue;
          used[a.id] = used[b.id] = true;
          next.push_back(std::move(m));
          any = true;
          break;
        }
      }
    }
    if (!any) return g;
    for (const auto& b : g.blocks) {
      if (!used[b.id]) next.push_back({b.bbox, b.kind, b.avg_char_height_block});
    }
    g = rebuild(g, std::move(next));
  }
}

}  // namespace

double alignment_tolerance(double avg_char_height_doc, const GroupingTolerances& tol) {
  return std::max(tol.align_min_px, tol.align_char_fraction * avg_char_height_doc);
}

bool same_char_height(double a, double b, const GroupingTolerances& tol) {
  return std::abs(a - b) <= tol.char_height_rel * std::max(a, b);
}

bool symmetry_mergeable(const Block& upper, const Block& lower, std::span<const HorizontalLine> lines,
                        double avg_char_height_doc) {
  if (upper.kind != Kind::Text || lower.kind != Kind::Text) return false;
  if (!x_aligned(upper.bbox, lower.bbox, alignment_tolerance(avg_char_height_doc))) return false;
  if (!same_char_height(upper.avg_char_height_block, lower.avg_char_height_block)) return false;
  const double gap = lower.bbox.y - upper.bbox.bottom();
  if (!(gap < avg_char_height_doc)) return false;

  const double y0 = std::min(upper.bbox.bottom(), lower.bbox.y);
  const double y1 = std::max(upper.bbox.bottom(), lower.bbox.y);
  const double x0 = std::max(upper.bbox.x, lower.bbox.x);
  const double x1 = std::min(upper.bbox.right(), lower.bbox.right());
  for (const auto& line : lines) {
    if (line.y >= y0 && line.y <= y1 && std::min(line.x1, x1) > std::max(line.x0, x0)) {
      return false;
    }
  }
  return true;
}

RawBlock merge_text_blocks(const Block& a, const Block& b) {
  const double wa = a.bbox.area();
  const double wb = b.bbox.area();
  const double ach = (wa + wb) > 0
                         ? (a.avg_char_height_block * wa + b.avg_char_height_block * wb) / (wa + wb)
                         : a.avg_char_height_block;
  return {unite(a.bbox, b.bbox), Kind::Text, ach};
}

LayoutGraph symmetry_maximize(const LayoutGraph& graph, std::span<const HorizontalLine> lines,
                              double avg_char_height_doc) {
  return merge_to_fixpoint(
      graph,
      [&](const Block& a, const Block& b, Direction d) {
        return d == Direction::Bottom && symmetry_mergeable(a, b, lines, avg_char_height_doc);
      },
      merge_text_blocks);
}

LayoutGraph hypothesis_remove_small(const LayoutGraph& graph) {
  std::vector<bool> drop(graph.size(), false);
  auto has_text = [&](const std::vector<BlockId>& ids) {
    return std::any_of(ids.begin(), ids.end(),
                       [&](BlockId id) { return graph.blocks[id].kind == Kind::Text; });
  };
  for (const auto& b : graph.blocks) {
    drop[b.id] = b.bbox.h <= graph.avg_char_height_doc &&
                 has_text(graph.neighbors_of(b.id, Direction::Top)) &&
                 has_text(graph.neighbors_of(b.id, Direction::Bottom));
  }
  LayoutGraph g = remove_blocks(graph, drop);
  g.hypothesis = Hypothesis::H2;
  return g;
}

LayoutGraph hypothesis_merge_nontext(const LayoutGraph& graph, double avg_char_height_doc) {
  const double tol = alignment_tolerance(avg_char_height_doc);
  const double max_gap = kNonTextGapChars * avg_char_height_doc;
  LayoutGraph g = merge_to_fixpoint(
      graph,
      [&](const Block& a, const Block& b, Direction d) {
        if (a.kind != Kind::NonText || b.kind != Kind::NonText) return false;
        if (d == Direction::Bottom) {
          return x_aligned(a.bbox, b.bbox, tol) && b.bbox.y - a.bbox.bottom() < max_gap;
        }
        return y_aligned(a.bbox, b.bbox, tol) && b.bbox.x - a.bbox.right() < max_gap;
      },
      [](const Block& a, const Block& b) { return RawBlock{unite(a.bbox, b.bbox), Kind::NonText, 0.0}; });
  g.hypothesis = Hypothesis::H3;
  return g;
}

LayoutGraph hypothesis_remove_captions(const LayoutGraph& graph, double avg_char_height_doc) {
  std::vector<bool> drop(graph.size(), false);
  auto nearest_is_close_nontext = [&](const Block& b, Direction d) {
    double best = std::numeric_limits<double>::infinity();
    const Block* nearest = nullptr;
    for (BlockId id : graph.neighbors_of(b.id, d)) {
      const Block& n = graph.blocks[id];
      const double gap = d == Direction::Top ? b.bbox.y - n.bbox.bottom() : n.bbox.y - b.bbox.bottom();
      if (gap < best) {
        best = gap;
        nearest = &n;
      }
    }
    return nearest && nearest->kind == Kind::NonText && best <= kCaptionGapChars * avg_char_height_doc;
  };
  for (const auto& b : graph.blocks) {
    drop[b.id] = b.kind == Kind::Text && b.bbox.h <= kCaptionHeightChars * avg_char_height_doc &&
                 (nearest_is_close_nontext(b, Direction::Top) ||
                  nearest_is_close_nontext(b, Direction::Bottom));
  }
  LayoutGraph g = remove_blocks(graph, drop);
  g.hypothesis = Hypothesis::H4;
  return g;
}

double derive_avg_char_height(std::span<const RawBlock> blocks) {
  std::vector<double> hs;
  for (const auto& b : blocks) {
    if (b.kind == Kind::Text && b.avg_char_height_block > 0) hs.push_back(b.avg_char_height_block);
  }
  if (hs.empty()) return 0;
  auto mid = hs.begin() + static_cast<std::ptrdiff_t>((hs.size() - 1) / 2);
  std::nth_element(hs.begin(), mid, hs.end());
  return *mid;
}

std::array<LayoutGraph, 4> build_all_hypotheses(const PageAnnotation& page) {
  const double ach = page.avg_char_height_doc.value_or(derive_avg_char_height(page.blocks));
  LayoutGraph base = graph_from_raw(page.blocks, page.page, ach, page.doc_id);
  LayoutGraph h1 = symmetry_maximize(base, page.lines, ach);
  h1.hypothesis = Hypothesis::H1;
  LayoutGraph h2 = hypothesis_remove_small(h1);
  LayoutGraph h3 = hypothesis_merge_nontext(h1, ach);
  LayoutGraph h4 = hypothesis_remove_captions(h1, ach);
  return {std::move(h1), std::move(h2), std::move(h3), std::move(h4)};
}

}  // namespace layoutsearch
