#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "layoutsearch/error.hpp"
#include "layoutsearch/eval.hpp"

namespace layoutsearch {

namespace {

constexpr double kSplitLo = 0.3;
constexpr double kSplitHi = 0.7;
constexpr double kEarlyLeaf = 0.1;      // chance a region stops splitting early
constexpr double kMinTextChars = 3;      // minimum block height in character heights
constexpr double kMinWidthChars = 10;
constexpr double kFillInsetChars = 2.5;  // fill blocks keep this far from planted blocks
constexpr double kSmallDecoyChars = 0.6;
constexpr double kCaptionGapChars = 0.5;
constexpr int kCutAttempts = 8;

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
bool coin(Rng& rng, double p) { return p > 0 && std::uniform_real_distribution<double>(0, 1)(rng) < p; }
std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

Rect snap(double x0, double y0, double x1, double y1) {
  const double x = std::round(x0);
  const double y = std::round(y0);
  return {x, y, std::round(x1) - x, std::round(y1) - y};
}

bool blocked(const std::vector<std::pair<double, double>>& zones, double v) {
  return std::any_of(zones.begin(), zones.end(), [&](const auto& z) { return v >= z.first && v <= z.second; });
}

// Intervals along the border of `area` on side d where the first planted
// block seen from outside sits back from the border, e.g. gutters reaching
// it. An outside edge inside one would be visible through the gap.
std::vector<std::pair<double, double>> recessed(const std::vector<Rect>& rs, const Rect& area, Direction d) {
  const bool across = d == Direction::Top || d == Direction::Bottom;
  auto lo = [&](const Rect& r) { return across ? r.x : r.y; };
  auto hi = [&](const Rect& r) { return across ? r.right() : r.bottom(); };
  auto depth = [&](const Rect& r) {
    switch (d) {
      case Direction::Top: return r.y - area.y;
      case Direction::Bottom: return area.bottom() - r.bottom();
      case Direction::Left: return r.x - area.x;
      case Direction::Right: return area.right() - r.right();
    }
    return 0.0;
  };
  std::vector<double> cuts{lo(area), hi(area)};
  for (const auto& r : rs) {
    cuts.push_back(lo(r));
    cuts.push_back(hi(r));
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    if (a < lo(area) || b > hi(area)) continue;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : rs) {
      if (lo(r) <= a && hi(r) >= b) best = std::min(best, depth(r));
    }
    if (best <= 0) continue;
    if (!out.empty() && out.back().second == a) out.back().second = b;
    else out.push_back({a, b});
  }
  return out;
}

struct DocBuilder {
  const SynthParams& p;
  Rng& rng;
  std::vector<RawBlock> blocks;

  double g() const { return std::round(p.gutter_chars * p.char_height); }
  double min_h() const { return kMinTextChars * p.char_height; }
  double min_w() const { return kMinWidthChars * p.char_height; }

  // Open intervals that edges produced by horizontal (y) or vertical (x) cuts
  // must avoid.
  std::vector<std::pair<double, double>> avoid_y;
  std::vector<std::pair<double, double>> avoid_x;

  Kind random_kind() { return coin(rng, p.nontext_prob) ? Kind::NonText : Kind::Text; }
  // Solid strips this thin are rulings to the raster pipeline, so they are
  // drawn as text instead.
  Kind random_kind(const Rect& r) {
    const Kind k = random_kind();
    return r.w >= 20 * r.h || r.h >= 20 * r.w ? Kind::Text : k;
  }
  void add(const Rect& r, Kind k) { blocks.push_back({r, k, k == Kind::Text ? p.char_height : 0.0}); }

  void guillotine(const Rect& r, int depth) {
    if (r.w < min_w() || r.h < min_h()) return;
    const bool wide = r.w > 1.2 * r.h;
    const bool tall = r.h > 1.2 * r.w;
    bool vertical_cut = wide || (!tall && coin(rng, 0.5));
    if (depth > 0 && !coin(rng, kEarlyLeaf)) {
      for (int attempt = 0; attempt < kCutAttempts; ++attempt) {
        if (attempt % (kCutAttempts / 2) == 0 && attempt > 0) vertical_cut = !vertical_cut;
        const double f = uniform(rng, kSplitLo, kSplitHi);
        if (vertical_cut) {
          const double w1 = std::floor((r.w - g()) * f);
          const double w2 = r.w - g() - w1;
          if (w1 < min_w() || w2 < min_w()) continue;
          if (blocked(avoid_x, r.x + w1) || blocked(avoid_x, r.x + w1 + g())) continue;
          guillotine({r.x, r.y, w1, r.h}, depth - 1);
          guillotine({r.x + w1 + g(), r.y, w2, r.h}, depth - 1);
          return;
        }
        const double h1 = std::floor((r.h - g()) * f);
        const double h2 = r.h - g() - h1;
        if (h1 < min_h() || h2 < min_h()) continue;
        if (blocked(avoid_y, r.y + h1) || blocked(avoid_y, r.y + h1 + g())) continue;
        guillotine({r.x, r.y, r.w, h1}, depth - 1);
        guillotine({r.x, r.y + h1 + g(), r.w, h2}, depth - 1);
        return;
      }
    }
    add(r, random_kind(r));
  }

  int random_depth() { return std::uniform_int_distribution<int>(p.min_depth, p.max_depth)(rng); }
};

// Free distance from `r` going in direction d, against the given obstacles,
// restricted to r's perpendicular span.
double free_run(const Rect& r, Direction d, const std::vector<RawBlock>& obstacles, double limit) {
  double best = limit;
  for (const auto& o : obstacles) {
    const Rect& b = o.bbox;
    if (b == r) continue;
    const bool vertical = d == Direction::Top || d == Direction::Bottom;
    const double ov = vertical ? std::min(r.right(), b.right()) - std::max(r.x, b.x)
                               : std::min(r.bottom(), b.bottom()) - std::max(r.y, b.y);
    if (ov <= 0) continue;
    double gap = -1;
    switch (d) {
      case Direction::Bottom: gap = b.y - r.bottom(); break;
      case Direction::Top: gap = r.y - b.bottom(); break;
      case Direction::Right: gap = b.x - r.right(); break;
      case Direction::Left: gap = r.x - b.right(); break;
    }
    if (gap >= 0) best = std::min(best, gap);
  }
  return best;
}

std::size_t find_block(const std::vector<RawBlock>& blocks, const Rect& r) {
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].bbox == r) return i;
  }
  return blocks.size();
}

// Thin text block in the gap between vertically stacked text blocks a and b.
std::optional<RawBlock> small_block_between(const Rect& a, const Rect& b, double ach) {
  const double h = std::max(1.0, std::round(kSmallDecoyChars * ach));
  const double x0 = std::max(a.x, b.x);
  const double x1 = std::min(a.right(), b.right());
  const double gap = b.y - a.bottom();
  if (x1 - x0 < 2 * ach || gap < h + 2 * std::ceil(ach / 2)) return std::nullopt;
  const double y = std::round(a.bottom() + (gap - h) / 2);
  return RawBlock{{x0, y, x1 - x0, h}, Kind::Text, h};
}

// One-line caption just below (or above) a non-text block.
std::optional<RawBlock> caption_for(const Rect& n, Direction side, const std::vector<RawBlock>& blocks, double ach,
                                    double limit) {
  const double w = std::round(n.w / 2);
  if (w < 2 * ach) return std::nullopt;
  const double gap = std::round(kCaptionGapChars * ach);
  Rect c{std::round(n.x + n.w / 4), 0, w, ach};
  c.y = side == Direction::Bottom ? n.bottom() + gap : n.y - gap - ach;
  if (free_run(n, side, blocks, limit) < gap + ach + ach) return std::nullopt;
  return RawBlock{c, Kind::Text, ach};
}

// Two halves of a non-text block separated by one character height.
std::pair<RawBlock, RawBlock> split_nontext(const Rect& n, bool vertical_cut, double ach) {
  if (vertical_cut) {
    const double w1 = std::floor((n.w - ach) / 2);
    return {{{n.x, n.y, w1, n.h}, Kind::NonText, 0}, {{n.x + w1 + ach, n.y, n.w - w1 - ach, n.h}, Kind::NonText, 0}};
  }
  const double h1 = std::floor((n.h - ach) / 2);
  return {{{n.x, n.y, n.w, h1}, Kind::NonText, 0}, {{n.x, n.y + h1 + ach, n.w, n.h - h1 - ach}, Kind::NonText, 0}};
}

bool splittable(const Rect& n, bool vertical_cut, double ach) {
  return vertical_cut ? n.w >= 2 * ach + ach + 2 : n.h >= 2 * ach + ach + 2;
}

struct PlantResult {
  Planting planting;
  Rect area;
};

// Smallest positive gap between sketch blocks facing each other along x and
// along y; infinity when there is none.
std::pair<double, double> min_sketch_gaps(const QueryLayout& q) {
  double gx = std::numeric_limits<double>::infinity(), gy = gx;
  for (const auto& a : q.blocks) {
    for (const auto& c : q.blocks) {
      const Rect &ra = a.bbox, &rc = c.bbox;
      if (std::min(ra.bottom(), rc.bottom()) > std::max(ra.y, rc.y) && rc.x - ra.right() > 0) gx = std::min(gx, rc.x - ra.right());
      if (std::min(ra.right(), rc.right()) > std::max(ra.x, rc.x) && rc.y - ra.bottom() > 0) gy = std::min(gy, rc.y - ra.bottom());
    }
  }
  return {gx, gy};
}

PlantResult plant(DocBuilder& b, const NamedLayout& nl) {
  const SynthParams& p = b.p;
  const QueryLayout& q = nl.layout;
  const double m = b.g();
  const double span = std::min(p.page.w, p.page.h) - 2 * m;
  const double s0 = 0.95 * span / (2 * std::max(q.canvas.w, q.canvas.h));
  Planting pl;
  pl.layout = nl.name;
  pl.sx = s0 * uniform(b.rng, 0.5, 2.0);
  pl.sy = s0 * uniform(b.rng, 0.5, 2.0);
  // Sketch gaps must stay at least one gutter wide on the page, or rendered
  // blocks fuse; the planting must still fit.
  const auto [gx, gy] = min_sketch_gaps(q);
  pl.sx = std::min(std::max(pl.sx, (m + 1) / gx), (p.page.w - 2 * m) / q.canvas.w);
  pl.sy = std::min(std::max(pl.sy, (m + 1) / gy), (p.page.h - 2 * m) / q.canvas.h);
  const double pw = q.canvas.w * pl.sx;
  const double ph = q.canvas.h * pl.sy;
  pl.tx = std::round(uniform(b.rng, m, p.page.w - m - pw));
  pl.ty = std::round(uniform(b.rng, m, p.page.h - m - ph));
  auto map = [&](const Rect& r) {
    return snap(pl.tx + r.x * pl.sx, pl.ty + r.y * pl.sy, pl.tx + r.right() * pl.sx, pl.ty + r.bottom() * pl.sy);
  };
  const Rect area = map({0, 0, q.canvas.w, q.canvas.h});

  for (const auto& qb : q.blocks) {
    const Rect r = map(qb.bbox);
    Kind k = b.random_kind(r);
    if (qb.kind == QueryKind::Text) k = Kind::Text;
    if (qb.kind == QueryKind::NonText) k = Kind::NonText;
    b.add(r, k);
    pl.blocks.push_back(r);
  }

  const double inset = std::max(std::round(kFillInsetChars * p.char_height), m);
  const double min_fill = b.min_h();
  for (const auto& d : q.dummies) {
    const Rect dr = map(d.bbox);
    // Sides on the canvas border need no inset; the outer gutter separates them.
    double l = d.bbox.x <= 0 ? 0 : inset;
    double t = d.bbox.y <= 0 ? 0 : inset;
    double r = d.bbox.right() >= q.canvas.w ? 0 : inset;
    double bt = d.bbox.bottom() >= q.canvas.h ? 0 : inset;
    auto shrink = [&](double& a, double& c, double extent) {
      const double room = extent - min_fill;
      if (a + c > room) {
        const double f = room > 0 ? room / (a + c) : 0;
        a = std::floor(a * f);
        c = std::floor(c * f);
      }
    };
    shrink(l, r, dr.w);
    shrink(t, bt, dr.h);
    const Rect f{dr.x + l, dr.y + t, dr.w - l - r, dr.h - t - bt};
    std::vector<Rect> fill;
    if (!f.empty()) {
      const bool across = d.direction == Direction::Top || d.direction == Direction::Bottom;
      const double extent = across ? f.w : f.h;
      std::size_t k = 1 + pick(b.rng, 4);
      while (k > 1 && (extent - static_cast<double>(k - 1) * inset) / static_cast<double>(k) < min_fill) --k;
      const double piece = std::floor((extent - static_cast<double>(k - 1) * inset) / static_cast<double>(k));
      for (std::size_t i = 0; i < k; ++i) {
        const double o = static_cast<double>(i) * (piece + inset);
        const double len = i + 1 == k ? extent - o : piece;
        fill.push_back(across ? Rect{f.x + o, f.y, len, f.h} : Rect{f.x, f.y + o, f.w, len});
      }
    }
    for (const auto& r2 : fill) b.add(r2, b.random_kind(r2));
    pl.fills.push_back(std::move(fill));
  }
  return {std::move(pl), area};
}

// Adds one decoy inside a planting; returns false when none applies.
bool plant_decoy(DocBuilder& b, Planting& pl, const QueryLayout& q) {
  const double ach = b.p.char_height;
  std::vector<DecoyKind> options;
  std::vector<std::pair<std::size_t, std::size_t>> stacked;
  std::vector<std::pair<std::size_t, Direction>> captions;
  std::vector<std::pair<std::size_t, bool>> splits;
  auto kind_of = [&](std::size_t i) { return b.blocks[find_block(b.blocks, pl.blocks[i])].kind; };

  for (std::size_t i = 0; i < q.blocks.size(); ++i) {
    for (BlockId j : q.neighbors_of(i, Direction::Bottom)) {
      if (q.is_dummy(j) || kind_of(i) != Kind::Text || kind_of(j) != Kind::Text) continue;
      if (small_block_between(pl.blocks[i], pl.blocks[j], ach)) stacked.push_back({i, j});
    }
    if (kind_of(i) != Kind::NonText) continue;
    for (Direction side : {Direction::Bottom, Direction::Top}) {
      if (q.neighbors_of(i, side).empty()) continue;
      if (caption_for(pl.blocks[i], side, b.blocks, ach, b.p.page.h)) captions.push_back({i, side});
    }
    const bool vert_nb = !q.neighbors_of(i, Direction::Top).empty() || !q.neighbors_of(i, Direction::Bottom).empty();
    const bool horiz_nb = !q.neighbors_of(i, Direction::Left).empty() || !q.neighbors_of(i, Direction::Right).empty();
    // Cut across the side that has query neighbors so both halves face them.
    if (vert_nb && splittable(pl.blocks[i], true, ach)) splits.push_back({i, true});
    else if (horiz_nb && splittable(pl.blocks[i], false, ach)) splits.push_back({i, false});
  }
  if (!stacked.empty()) options.push_back(DecoyKind::SmallBlock);
  if (!captions.empty()) options.push_back(DecoyKind::Caption);
  if (!splits.empty()) options.push_back(DecoyKind::SplitNonText);
  if (options.empty()) return false;

  const DecoyKind kind = options[pick(b.rng, options.size())];
  switch (kind) {
    case DecoyKind::SmallBlock: {
      const auto [i, j] = stacked[pick(b.rng, stacked.size())];
      b.blocks.push_back(*small_block_between(pl.blocks[i], pl.blocks[j], ach));
      break;
    }
    case DecoyKind::Caption: {
      const auto [i, side] = captions[pick(b.rng, captions.size())];
      b.blocks.push_back(*caption_for(pl.blocks[i], side, b.blocks, ach, b.p.page.h));
      break;
    }
    case DecoyKind::SplitNonText: {
      const auto [i, vertical_cut] = splits[pick(b.rng, splits.size())];
      const std::size_t at = find_block(b.blocks, pl.blocks[i]);
      auto [x, y] = split_nontext(pl.blocks[i], vertical_cut, ach);
      b.blocks[at] = x;
      b.blocks.push_back(y);
      break;
    }
  }
  pl.decoys.push_back(kind);
  return true;
}

void background_decoy(DocBuilder& b, std::size_t first_background, std::size_t end_background) {
  const double ach = b.p.char_height;
  const double g = b.g();
  std::vector<std::pair<std::size_t, std::size_t>> stacked;
  std::vector<std::size_t> nontext;
  for (std::size_t i = first_background; i < end_background; ++i) {
    const Rect& a = b.blocks[i].bbox;
    if (b.blocks[i].kind == Kind::NonText) nontext.push_back(i);
    for (std::size_t j = first_background; j < end_background; ++j) {
      const Rect& c = b.blocks[j].bbox;
      if (b.blocks[i].kind == Kind::Text && b.blocks[j].kind == Kind::Text && c.y - a.bottom() == g &&
          small_block_between(a, c, ach)) {
        stacked.push_back({i, j});
      }
    }
  }
  const std::size_t choice = pick(b.rng, 3);
  if (choice == 0 && !stacked.empty()) {
    const auto [i, j] = stacked[pick(b.rng, stacked.size())];
    b.blocks.push_back(*small_block_between(b.blocks[i].bbox, b.blocks[j].bbox, ach));
  } else if (choice == 1 && !nontext.empty()) {
    const std::size_t i = nontext[pick(b.rng, nontext.size())];
    if (auto c = caption_for(b.blocks[i].bbox, Direction::Bottom, b.blocks, ach, b.p.page.h - b.blocks[i].bbox.bottom())) {
      b.blocks.push_back(*c);
    }
  } else if (choice == 2 && !nontext.empty()) {
    const std::size_t i = nontext[pick(b.rng, nontext.size())];
    const bool vertical_cut = coin(b.rng, 0.5);
    if (splittable(b.blocks[i].bbox, vertical_cut, ach)) {
      auto [x, y] = split_nontext(b.blocks[i].bbox, vertical_cut, ach);
      b.blocks[i] = x;
      b.blocks.push_back(y);
    }
  }
}

}  // namespace

std::string_view to_string(DecoyKind k) {
  switch (k) {
    case DecoyKind::SmallBlock: return "small_block";
    case DecoyKind::Caption: return "caption";
    case DecoyKind::SplitNonText: return "split_nontext";
  }
  return "?";
}

SynthCorpus synth_corpus(const SynthParams& params) {
  if (params.min_depth < 1 || params.max_depth < params.min_depth) throw InvalidInput("bad depth range");
  SynthCorpus out;
  out.pages.resize(params.docs);
  std::vector<std::optional<Planting>> plantings(params.docs);

  const auto n = static_cast<std::ptrdiff_t>(params.docs);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t di = 0; di < n; ++di) {
    const auto i = static_cast<std::size_t>(di);
    std::seed_seq seq{static_cast<std::uint64_t>(params.seed), static_cast<std::uint64_t>(i)};
    Rng rng(seq);
    DocBuilder b{params, rng, {}, {}, {}};
    PageAnnotation& page = out.pages[i];
    page.doc_id = "doc" + std::to_string(params.seed) + "_" + std::to_string(i);
    page.page = params.page;
    page.avg_char_height_doc = params.char_height;

    const double m = b.g();
    const Rect full{m, m, params.page.w - 2 * m, params.page.h - 2 * m};
    std::optional<std::size_t> which;
    if (!params.plant.empty()) {
      if (params.plant_rate >= 1) which = i % params.plant.size();
      else if (coin(rng, params.plant_rate)) which = pick(rng, params.plant.size());
    }

    std::size_t background_begin = 0;
    std::size_t background_end = 0;
    if (!which) {
      b.guillotine(full, b.random_depth() - 1);
      background_end = b.blocks.size();
    } else {
      const NamedLayout& nl = params.plant[*which];
      auto [pl, area] = plant(b, nl);
      background_begin = b.blocks.size();
      const double g = b.g();
      const int depth = std::max(0, b.random_depth() - 2);
      std::vector<Rect> inside;
      for (std::size_t k = 0; k < background_begin; ++k) inside.push_back(b.blocks[k].bbox);
      b.avoid_x = recessed(inside, area, Direction::Top);
      b.guillotine({full.x, full.y, full.w, area.y - g - full.y}, depth);
      b.avoid_x = recessed(inside, area, Direction::Bottom);
      b.guillotine({full.x, area.bottom() + g, full.w, full.bottom() - area.bottom() - g}, depth);
      b.avoid_x.clear();
      b.avoid_y = recessed(inside, area, Direction::Left);
      b.guillotine({full.x, area.y, area.x - g - full.x, area.h}, depth);
      b.avoid_y = recessed(inside, area, Direction::Right);
      b.guillotine({area.right() + g, area.y, full.right() - area.right() - g, area.h}, depth);
      b.avoid_y.clear();
      background_end = b.blocks.size();
      pl.doc_id = page.doc_id;
      if (coin(rng, params.decoy_rate)) plant_decoy(b, pl, nl.layout);
      plantings[i] = std::move(pl);
    }

    const double extra = params.background_decoys;
    std::size_t count = static_cast<std::size_t>(extra);
    if (coin(rng, extra - static_cast<double>(count))) ++count;
    for (std::size_t k = 0; k < count && background_end > background_begin; ++k) {
      background_decoy(b, background_begin, background_end);
    }
    page.blocks = std::move(b.blocks);
  }

  for (auto& pl : plantings) {
    if (pl) out.truth.plantings.push_back(std::move(*pl));
  }
  return out;
}

GrayImage render_page(const PageAnnotation& page) {
  constexpr std::uint8_t kBackground = 235;
  constexpr std::uint8_t kInk = 20;
  GrayImage img(static_cast<int>(page.page.w), static_cast<int>(page.page.h), kBackground);
  auto fill = [&](double x0, double y0, double x1, double y1) {
    const int ix0 = std::max(0, static_cast<int>(x0));
    const int iy0 = std::max(0, static_cast<int>(y0));
    const int ix1 = std::min(img.width, static_cast<int>(x1));
    const int iy1 = std::min(img.height, static_cast<int>(y1));
    for (int y = iy0; y < iy1; ++y) {
      for (int x = ix0; x < ix1; ++x) img.at(x, y) = kInk;
    }
  };

  const double ach = page.avg_char_height_doc.value_or(derive_avg_char_height(page.blocks));
  const double glyph_w = std::max(1.0, std::round(0.6 * ach));
  const double glyph_gap = std::max(1.0, std::round(0.35 * ach));
  const double word_gap = std::max(2.0, std::round(ach));
  const double pitch = std::round(1.8 * ach);
  for (const auto& b : page.blocks) {
    const Rect& r = b.bbox;
    if (b.kind == Kind::NonText) {
      fill(r.x, r.y, r.right(), r.bottom());
      continue;
    }
    const double row_h = std::min(r.h, std::round(b.avg_char_height_block > 0 ? b.avg_char_height_block : ach));
    std::vector<double> rows;
    for (double y = r.y; y + row_h <= r.bottom(); y += pitch) rows.push_back(y);
    if (rows.empty() || rows.back() + row_h < r.bottom()) {
      // Rows that would touch fuse into one taller component, so the bottom
      // row replaces the last one instead.
      if (rows.size() > 1 && rows.back() + row_h + glyph_gap > r.bottom() - row_h) rows.pop_back();
      rows.push_back(r.bottom() - row_h);
    }
    for (double y : rows) {
      std::vector<double> xs;
      int in_word = 0;
      for (double x = r.x; x + glyph_w <= r.right();) {
        xs.push_back(x);
        x += glyph_w + (++in_word % 5 == 0 ? word_gap : glyph_gap);
      }
      if (xs.empty() || xs.back() + glyph_w < r.right()) xs.push_back(std::max(r.x, r.right() - glyph_w));
      for (double x : xs) fill(x, y, std::min(x + glyph_w, r.right()), y + row_h);
    }
  }
  return img;
}

QueryLayout random_query(std::mt19937_64& rng, int type, int max_depth) {
  if (type < 1 || type > 6) throw InvalidInput("query type must be 1..6");
  constexpr double kCanvas = 100;
  constexpr double kGutter = 4;
  constexpr double kMinTile = 18;
  for (;;) {
    std::vector<Rect> tiles;
    std::function<void(const Rect&, int)> split = [&](const Rect& r, int depth) {
      if (depth > 0 && (tiles.empty() || coin(rng, 0.8))) {
        const bool vertical_cut = r.w > r.h || (r.w == r.h && coin(rng, 0.5));
        const double extent = vertical_cut ? r.w : r.h;
        const double a = std::round((extent - kGutter) * uniform(rng, kSplitLo, kSplitHi));
        const double c = extent - kGutter - a;
        if (a >= kMinTile && c >= kMinTile) {
          if (vertical_cut) {
            split({r.x, r.y, a, r.h}, depth - 1);
            split({r.x + a + kGutter, r.y, c, r.h}, depth - 1);
          } else {
            split({r.x, r.y, r.w, a}, depth - 1);
            split({r.x, r.y + a + kGutter, r.w, c}, depth - 1);
          }
          return;
        }
      }
      tiles.push_back(r);
    };
    split({0, 0, kCanvas, kCanvas}, std::uniform_int_distribution<int>(1, max_depth)(rng));

    const bool vacant = type >= 4;
    if (vacant) {
      if (tiles.size() < 2) continue;
      tiles.erase(tiles.begin() + static_cast<std::ptrdiff_t>(pick(rng, tiles.size())));
    }
    const int base = vacant ? type - 3 : type;
    if (base == 3 && tiles.size() < 2) continue;

    std::vector<QueryBlock> blocks;
    for (const auto& t : tiles) {
      QueryKind k = coin(rng, 0.3) ? QueryKind::NonText : QueryKind::Text;
      if (base == 2) k = QueryKind::Any;
      blocks.push_back({t, k});
    }
    if (base == 3) {
      const std::size_t any = pick(rng, blocks.size());
      blocks[any].kind = QueryKind::Any;
      const std::size_t fixed = (any + 1 + pick(rng, blocks.size() - 1)) % blocks.size();
      if (blocks[fixed].kind == QueryKind::Any) blocks[fixed].kind = QueryKind::Text;
    }
    QueryLayout q = make_layout({kCanvas, kCanvas}, std::move(blocks));
    if (q.type == type) return q;
  }
}

std::vector<NamedLayout> standard_battery(std::uint64_t seed, std::size_t per_type) {
  std::vector<NamedLayout> out;
  Rng rng(seed);
  for (int t = 1; t <= 6; ++t) {
    for (std::size_t i = 0; i < per_type; ++i) {
      out.push_back({"t" + std::to_string(t) + "_" + std::to_string(i), random_query(rng, t)});
    }
  }
  return out;
}

}  // namespace layoutsearch
