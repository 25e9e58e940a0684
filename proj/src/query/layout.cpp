#include <algorithm>
#include <limits>

#include "layoutsearch/error.hpp"
#include "layoutsearch/query.hpp"

namespace layoutsearch {

namespace {

// Maps a rectangle into a frame where `d` points along +x, and back.
struct Frame {
  Direction d;
  PageDims canvas;  // original canvas

  PageDims dims() const {
    return (d == Direction::Left || d == Direction::Right) ? canvas : PageDims{canvas.h, canvas.w};
  }
  Rect to(const Rect& r) const {
    switch (d) {
      case Direction::Right: return r;
      case Direction::Left: return {canvas.w - r.right(), r.y, r.w, r.h};
      case Direction::Bottom: return {r.y, r.x, r.h, r.w};
      case Direction::Top: return {canvas.h - r.bottom(), r.x, r.h, r.w};
    }
    return r;
  }
  Rect from(const Rect& t) const {
    switch (d) {
      case Direction::Right: return t;
      case Direction::Left: return {canvas.w - t.right(), t.y, t.w, t.h};
      case Direction::Bottom: return {t.y, t.x, t.h, t.w};
      case Direction::Top: return {t.y, canvas.h - t.right(), t.h, t.w};
    }
    return t;
  }
};

double overlap_1d(double a0, double a1, double b0, double b1) { return std::min(a1, b1) - std::max(a0, b0); }

// Empty strip beyond the +x side of block `a` in frame coordinates, grown
// sideways until the nearest block or the canvas edge.
std::optional<Rect> forward_strip(const std::vector<Rect>& rs, std::size_t a, const PageDims& dims) {
  const Rect& A = rs[a];
  const double f = A.right();
  double x1 = dims.w;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (i == a) continue;
    const Rect& c = rs[i];
    if (overlap_1d(A.y, A.bottom(), c.y, c.bottom()) > 0 && c.right() > f) x1 = std::min(x1, std::max(c.x, f));
  }
  if (x1 <= f) return std::nullopt;
  double y0 = 0;
  double y1 = dims.h;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (i == a) continue;
    const Rect& c = rs[i];
    if (overlap_1d(f, x1, c.x, c.right()) <= 0) continue;
    if (c.bottom() <= A.y) y0 = std::max(y0, c.bottom());
    if (c.y >= A.bottom()) y1 = std::min(y1, c.y);
  }
  return Rect{f, y0, x1 - f, y1 - y0};
}

// Second vacancy rule: both strip dimensions exceed the smallest width and
// height among the blocks adjacent to it.
bool exceeds_adjacent_minimum(const std::vector<QueryBlock>& blocks, const Rect& strip) {
  std::vector<Rect> rs;
  for (const auto& b : blocks) rs.push_back(b.bbox);
  rs.push_back(strip);
  const Adjacency adj = compute_adjacency(rs);
  const std::size_t s = rs.size() - 1;
  double min_w = std::numeric_limits<double>::infinity();
  double min_h = min_w;
  for (const auto& list : adj.neighbors[s]) {
    for (BlockId id : list) {
      min_w = std::min(min_w, rs[id].w);
      min_h = std::min(min_h, rs[id].h);
    }
  }
  return strip.w > min_w && strip.h > min_h;
}

}  // namespace

std::vector<DummyBlock> detect_vacancies(const PageDims& canvas, const std::vector<QueryBlock>& blocks) {
  std::vector<DummyBlock> strips;
  for (std::size_t a = 0; a < blocks.size(); ++a) {
    for (Direction d : kDirections) {
      const Frame fr{d, canvas};
      std::vector<Rect> rs;
      rs.reserve(blocks.size());
      for (const auto& b : blocks) rs.push_back(fr.to(b.bbox));
      auto strip = forward_strip(rs, a, fr.dims());
      if (!strip || strip->empty()) continue;
      const Rect s = fr.from(*strip);
      if (strip->w > kVacancyFraction * rs[a].w || exceeds_adjacent_minimum(blocks, s)) {
        strips.push_back({s, a, d});
      }
    }
  }

  auto free_of_blocks = [&](const Rect& r) {
    return std::none_of(blocks.begin(), blocks.end(), [&](const QueryBlock& b) { return intersects(r, b.bbox); });
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < strips.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < strips.size() && !changed; ++j) {
        if (!intersects(strips[i].bbox, strips[j].bbox)) continue;
        const Rect u = unite(strips[i].bbox, strips[j].bbox);
        if (free_of_blocks(u)) {
          strips[i].bbox = u;
        } else if (strips[j].bbox.area() > strips[i].bbox.area()) {
          strips[i] = strips[j];
        }
        strips.erase(strips.begin() + static_cast<std::ptrdiff_t>(j));
        changed = true;
      }
    }
  }
  return strips;
}

int query_type(const std::vector<QueryBlock>& blocks, bool has_vacancies) {
  const auto any = std::count_if(blocks.begin(), blocks.end(), [](const QueryBlock& b) { return b.kind == QueryKind::Any; });
  int base = 3;
  if (any == 0) base = 1;
  else if (static_cast<std::size_t>(any) == blocks.size()) base = 2;
  return has_vacancies ? base + 3 : base;
}

std::size_t reference_block(const std::vector<QueryBlock>& blocks) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < blocks.size(); ++i) {
    const Rect& r = blocks[i].bbox;
    const Rect& b = blocks[best].bbox;
    if (r.y < b.y || (r.y == b.y && r.x < b.x)) best = i;
  }
  return best;
}

QueryLayout make_layout(const PageDims& canvas, std::vector<QueryBlock> blocks) {
  if (!(canvas.w > 0 && canvas.h > 0)) throw QueryError("canvas dimensions must be positive");
  if (blocks.empty()) throw QueryError("empty layout");
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const Rect& r = blocks[i].bbox;
    if (r.empty()) throw QueryError("block " + std::to_string(i) + " has zero area");
    if (r.x < 0 || r.y < 0 || r.right() > canvas.w || r.bottom() > canvas.h) {
      throw QueryError("block " + std::to_string(i) + " lies outside the canvas");
    }
    for (std::size_t j = 0; j < i; ++j) {
      const Rect& o = blocks[j].bbox;
      if (intersection_area(r, o) > kQueryOverlapTolerance * std::min(r.area(), o.area())) {
        throw QueryError("blocks " + std::to_string(j) + " and " + std::to_string(i) + " overlap");
      }
    }
  }

  QueryLayout q;
  q.canvas = canvas;
  q.blocks = std::move(blocks);
  q.dummies = detect_vacancies(canvas, q.blocks);
  q.reference = reference_block(q.blocks);
  q.type = query_type(q.blocks, !q.dummies.empty());
  std::vector<Rect> rs;
  for (std::size_t i = 0; i < q.node_count(); ++i) rs.push_back(q.node_bbox(i));
  q.adjacency = compute_adjacency(rs);
  return q;
}

QueryDescriptor reference_descriptor(const QueryLayout& layout) {
  QueryDescriptor d;
  const QueryBlock& ref = layout.blocks[layout.reference];
  if (ref.kind == QueryKind::Text) d.kind = Kind::Text;
  if (ref.kind == QueryKind::NonText) d.kind = Kind::NonText;
  for (Direction dir : kDirections) {
    const auto& list = layout.neighbors_of(layout.reference, dir);
    if (list.empty()) continue;
    // Dummies may absorb nothing on this side, so only solid blocks count.
    const auto solid = static_cast<std::size_t>(
        std::count_if(list.begin(), list.end(), [&](BlockId n) { return !layout.is_dummy(n); }));
    const auto count = static_cast<std::uint8_t>(std::min<std::size_t>(solid, kMaxNeighborCount));
    d.counts[static_cast<std::size_t>(dir)] = {count, solid == list.size()};
  }
  return d;
}

}  // namespace layoutsearch
