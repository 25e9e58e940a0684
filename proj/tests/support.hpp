#pragma once

// Page and query builders shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "layoutsearch/eval.hpp"
#include "layoutsearch/json_io.hpp"
#include "layoutsearch/query.hpp"

namespace layoutsearch::testing {

inline constexpr double kAch = 8;

struct Box {
  Rect r;
  Kind kind = Kind::Text;
};

inline Box text(double x, double y, double w, double h) { return {{x, y, w, h}, Kind::Text}; }
inline Box image(double x, double y, double w, double h) { return {{x, y, w, h}, Kind::NonText}; }

inline PageAnnotation page_of(std::string id, PageDims dims, const std::vector<Box>& boxes, double ach = kAch) {
  PageAnnotation p;
  p.doc_id = std::move(id);
  p.page = dims;
  p.avg_char_height_doc = ach;
  for (const auto& b : boxes) p.blocks.push_back({b.r, b.kind, b.kind == Kind::Text ? ach : 0.0});
  return p;
}

// Direct all-pairs visibility check, one direction at a time. b is below a
// iff x-projections overlap, b.y >= a.cy, a.bottom <= b.cy, and no c lying
// between them (c.y >= a.cy, c.bottom <= b.cy, x-overlapping a) touches the
// shared x interval or brackets it from both sides.
inline bool visible_below(const std::vector<Rect>& r, std::size_t a, std::size_t b) {
  const Rect &ra = r[a], &rb = r[b];
  const double lo = std::max(ra.x, rb.x), hi = std::min(ra.right(), rb.right());
  if (hi - lo <= 0 || rb.y < ra.cy() || ra.bottom() > rb.cy()) return false;
  bool left = false, right = false;
  for (std::size_t c = 0; c < r.size(); ++c) {
    if (c == a || c == b) continue;
    const Rect& rc = r[c];
    if (rc.y < ra.cy() || rc.bottom() > rb.cy()) continue;
    if (std::min(ra.right(), rc.right()) - std::max(ra.x, rc.x) <= 0) continue;
    if (std::min(hi, rc.right()) - std::max(lo, rc.x) > 0) return false;
    left = left || rc.right() <= lo;
    right = right || rc.x >= hi;
  }
  return !(left && right);
}

inline bool visible_right(const std::vector<Rect>& r, std::size_t a, std::size_t b) {
  const Rect &ra = r[a], &rb = r[b];
  const double lo = std::max(ra.y, rb.y), hi = std::min(ra.bottom(), rb.bottom());
  if (hi - lo <= 0 || rb.x < ra.cx() || ra.right() > rb.cx()) return false;
  bool up = false, down = false;
  for (std::size_t c = 0; c < r.size(); ++c) {
    if (c == a || c == b) continue;
    const Rect& rc = r[c];
    if (rc.x < ra.cx() || rc.right() > rb.cx()) continue;
    if (std::min(ra.bottom(), rc.bottom()) - std::max(ra.y, rc.y) <= 0) continue;
    if (std::min(hi, rc.bottom()) - std::max(lo, rc.y) > 0) return false;
    up = up || rc.bottom() <= lo;
    down = down || rc.y >= hi;
  }
  return !(up && down);
}

struct SketchBlock {
  Rect r;
  QueryKind kind = QueryKind::Any;
};

inline Json sketch_json(const std::vector<SketchBlock>& blocks) {
  Json arr = Json::array();
  for (const auto& b : blocks) {
    arr.push_back({{"x", number_json(b.r.x)},
                   {"y", number_json(b.r.y)},
                   {"w", number_json(b.r.w)},
                   {"h", number_json(b.r.h)},
                   {"kind", std::string(to_string(b.kind))}});
  }
  return Json{{"blocks", arr}};
}

inline std::string query_text(PageDims canvas, const std::vector<std::pair<std::string, std::vector<SketchBlock>>>& layouts,
                              const std::string& expr) {
  Json j;
  j["canvas"] = {{"w", number_json(canvas.w)}, {"h", number_json(canvas.h)}};
  j["layouts"] = Json::object();
  for (const auto& [name, blocks] : layouts) j["layouts"][name] = sketch_json(blocks);
  j["expr"] = expr;
  return dump(j);
}

// A 53-block newspaper-like page on a six-column grid. Exactly three images
// sit over exactly three text columns; the other images cover 2, 4 or 6.
inline PageAnnotation grid_page() {
  const double m = 60, g = 24, colw = (2400 - 2 * m - 5 * g) / 6;
  auto cx = [&](int c) { return m + c * (colw + g); };
  auto span = [&](int c0, int c1) { return cx(c1 - 1) + colw - cx(c0); };
  std::vector<Box> b;
  double y = m;
  // Masthead.
  b.push_back(text(m, y, 2400 - 2 * m, 120));
  y += 120 + g;
  // An image with a text column under each of its columns; other columns
  // run the full band height.
  auto band = [&](const std::vector<std::pair<int, int>>& images, double ih, double th) {
    std::vector<bool> covered(6, false);
    for (auto [c0, c1] : images) {
      b.push_back(image(cx(c0), y, span(c0, c1), ih));
      for (int c = c0; c < c1; ++c) {
        b.push_back(text(cx(c), y + ih + g, colw, th));
        covered[c] = true;
      }
    }
    for (int c = 0; c < 6; ++c) {
      if (!covered[c]) b.push_back(text(cx(c), y, colw, ih + g + th));
    }
    y += ih + g + th + g;
  };
  band({{0, 4}}, 260, 200);
  band({{0, 3}, {3, 6}}, 240, 180);
  band({{0, 2}, {2, 5}}, 220, 200);
  // Headline over two rows of six columns.
  b.push_back(text(m, y, 2400 - 2 * m, 64));
  y += 64 + g;
  for (int row = 0; row < 2; ++row) {
    for (int c = 0; c < 6; ++c) b.push_back(text(cx(c), y, colw, 150));
    y += 150 + g;
  }
  band({{0, 6}}, 300, 180);
  // Three rows of double-width columns.
  for (int row = 0; row < 3; ++row) {
    for (int c = 0; c < 6; c += 2) b.push_back(text(cx(c), y, span(c, c + 2), 120));
    y += 120 + g;
  }
  return page_of("grid", {2400, 3200}, b);
}

// Image over three text columns, canvas 100x100.
inline std::vector<SketchBlock> grid_sketch() {
  return {{{0, 0, 100, 40}, QueryKind::NonText},
          {{0, 44, 30, 56}, QueryKind::Text},
          {{35, 44, 30, 56}, QueryKind::Text},
          {{70, 44, 30, 56}, QueryKind::Text}};
}

// Sub-layouts of the three-document Boolean example.
//   A: image over two text columns
//   B: text beside an image
//   C: three images in a row
inline std::vector<SketchBlock> boolean_a() {
  return {{{0, 0, 100, 45}, QueryKind::NonText}, {{0, 50, 47, 50}, QueryKind::Text}, {{53, 50, 47, 50}, QueryKind::Text}};
}
inline std::vector<SketchBlock> boolean_b() {
  return {{{0, 0, 55, 100}, QueryKind::Text}, {{60, 0, 40, 100}, QueryKind::NonText}};
}
inline std::vector<SketchBlock> boolean_c() {
  return {{{0, 0, 30, 100}, QueryKind::NonText}, {{35, 0, 30, 100}, QueryKind::NonText}, {{70, 0, 30, 100}, QueryKind::NonText}};
}

inline std::string boolean_query() {
  return query_text({100, 100}, {{"A", boolean_a()}, {"B", boolean_b()}, {"C", boolean_c()}}, "(A,bottom) AND (B) AND (NOT C)");
}

// doc1: B on top, A at the bottom. doc2: A on top (wrong region), B below.
// doc3: like doc1 plus a row of three images.
inline std::vector<PageAnnotation> boolean_pages() {
  const PageDims dims{1000, 1400};
  auto a_at = [](double y) {
    return std::vector<Box>{image(200, y, 600, 150), text(200, y + 174, 288, 120), text(512, y + 174, 288, 120)};
  };
  auto b_at = [](double y) { return std::vector<Box>{text(60, y, 500, 260), image(584, y, 356, 260)}; };
  auto cat = [](std::vector<Box> a, const std::vector<Box>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  std::vector<Box> filler = {text(60, 700, 880, 200)};

  std::vector<PageAnnotation> out;
  out.push_back(page_of("doc1", dims, cat(cat(b_at(60), filler), a_at(1040))));
  out.push_back(page_of("doc2", dims, cat(cat(a_at(60), {text(60, 420, 880, 200)}), b_at(700))));
  std::vector<Box> c_row = {image(60, 360, 280, 200), image(360, 360, 280, 200), image(660, 360, 280, 200)};
  out.push_back(page_of("doc3", dims, cat(cat(cat(b_at(60), c_row), {text(60, 600, 880, 300)}), a_at(1040))));
  return out;
}

// Places `layout` on a page: canvas unit (u, v) maps to (tx + sx u, ty + sy v),
// edges rounded to whole pixels so edges shared in the sketch stay shared.
// Each dummy region is filled with one block inset 4 canvas units from its
// sides, so it never touches the planted blocks.
inline PageAnnotation instance_page(const std::string& id, const QueryLayout& layout, double sx, double sy, double tx,
                                    double ty, PageDims dims = {2400, 3200}) {
  std::vector<Box> boxes;
  auto map = [&](const Rect& r) {
    const double x0 = std::round(tx + sx * r.x), y0 = std::round(ty + sy * r.y);
    return Rect{x0, y0, std::round(tx + sx * r.right()) - x0, std::round(ty + sy * r.bottom()) - y0};
  };
  for (const auto& q : layout.blocks) boxes.push_back({map(q.bbox), q.kind == QueryKind::NonText ? Kind::NonText : Kind::Text});
  for (const auto& d : layout.dummies) {
    const Rect r = d.bbox;
    boxes.push_back({map({r.x + 4, r.y + 4, r.w - 8, r.h - 8}), Kind::Text});
  }
  return page_of(id, dims, boxes);
}

}  // namespace layoutsearch::testing
