#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"

#include "layoutsearch/error.hpp"
#include "layoutsearch/eval.hpp"
#include "layoutsearch/ingest.hpp"
#include "layoutsearch/raster.hpp"

using namespace layoutsearch;

namespace {

// Exhaustive threshold scan in exact integers:
// N^2 * sigma_B^2 = (s0*n1 - s1*n0)^2 / (n0*n1). First maximum wins.
int brute_otsu(const Histogram& h) {
  using u128 = unsigned __int128;
  std::int64_t n = 0, s = 0;
  for (int i = 0; i < 256; ++i) {
    n += static_cast<std::int64_t>(h[i]);
    s += static_cast<std::int64_t>(h[i]) * i;
  }
  int best = -1;
  u128 bn = 0, bd = 1;
  for (int t = 0; t < 256; ++t) {
    std::int64_t n0 = 0, s0 = 0;
    for (int i = 0; i <= t; ++i) {
      n0 += static_cast<std::int64_t>(h[i]);
      s0 += static_cast<std::int64_t>(h[i]) * i;
    }
    if (n0 == 0 || n0 == n) continue;
    __int128 d = static_cast<__int128>(s0) * (n - n0) - static_cast<__int128>(s - s0) * n0;
    if (d < 0) d = -d;
    const u128 num = static_cast<u128>(d) * static_cast<u128>(d);
    const u128 den = static_cast<u128>(n0) * static_cast<u128>(n - n0);
    if (best < 0 || num * bd > bn * den) {
      best = t;
      bn = num;
      bd = den;
    }
  }
  return best;
}

void fill(BinaryImage& b, int x, int y, int w, int h) {
  for (int j = y; j < y + h; ++j)
    for (int i = x; i < x + w; ++i) b.set(i, j, true);
}

// Rows of glyph boxes of height `ch`, as the generator renders text.
void glyph_rows(BinaryImage& b, int x, int y, int w, int rows, int ch) {
  for (int r = 0; r < rows; ++r) {
    for (int gx = x; gx + ch / 2 + 1 <= x + w; gx += ch / 2 + 3) fill(b, gx, y + r * (ch + 4), ch / 2 + 1, ch);
  }
}

}  // namespace

TEST_SUITE("raster") {

TEST_CASE("constant image is all background and degenerate") {
  GrayImage img(32, 32, 128);
  const Binarization b = binarize_otsu(img);
  CHECK(b.degenerate);
  CHECK(b.threshold == 128);
  CHECK(b.image.foreground_count() == 0);
}

TEST_CASE("bimodal image takes the lowest optimal threshold") {
  GrayImage img(16, 16, 200);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 16; ++x) img.at(x, y) = 50;
  const Binarization b = binarize_otsu(img);
  CHECK_FALSE(b.degenerate);
  CHECK(b.threshold == 50);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) CHECK(b.image.fg(x, y) == (y < 8));
}

TEST_CASE("otsu threshold equals the exhaustive optimum on random images") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 200; ++k) {
    Histogram h{};
    std::uniform_int_distribution<int> level(0, k % 2 ? 255 : 7);
    for (int i = 0; i < 64 * 64; ++i) ++h[static_cast<std::size_t>(k % 2 ? level(rng) : level(rng) * 36)];
    CHECK(otsu_threshold(h).threshold == brute_otsu(h));
  }
}

TEST_CASE("pgm round trip") {
  std::mt19937_64 rng(3);
  GrayImage img(37, 11);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng() & 0xff);
  const GrayImage back = decode_pgm(encode_pgm(img));
  CHECK(back.width == 37);
  CHECK(back.height == 11);
  CHECK(back.pixels == img.pixels);

  const GrayImage ascii = decode_pgm("P2\n# comment\n3 2\n255\n0 1 2\n3 4 255\n");
  CHECK(ascii.pixels == std::vector<std::uint8_t>{0, 1, 2, 3, 4, 255});
  CHECK_THROWS_AS(decode_pgm("not an image"), InvalidInput);
  CHECK_THROWS_AS(decode_pgm("P5\n4 4\n255\nab"), InvalidInput);
}

TEST_CASE("rulings") {
  SUBCASE("horizontal run") {
    BinaryImage b(600, 100);
    fill(b, 100, 50, 400, 2);
    const auto r = detect_rulings(b);
    REQUIRE(r.size() == 1);
    CHECK(r[0].orientation == Orientation::Horizontal);
    CHECK(r[0].span == Rect{100, 50, 400, 2});
  }
  SUBCASE("vertical run") {
    BinaryImage b(100, 600);
    fill(b, 50, 100, 2, 400);
    const auto r = detect_rulings(b);
    REQUIRE(r.size() == 1);
    CHECK(r[0].orientation == Orientation::Vertical);
    CHECK(r[0].span == Rect{50, 100, 2, 400});
  }
  SUBCASE("blank image") { CHECK(detect_rulings(BinaryImage(200, 200)).empty()); }
  SUBCASE("text is not a ruling") {
    BinaryImage b(400, 200);
    glyph_rows(b, 10, 10, 380, 5, 8);
    CHECK(detect_rulings(b).empty());
  }
}

TEST_CASE("remove rulings") {
  BinaryImage b(600, 600);
  glyph_rows(b, 20, 20, 200, 3, 8);
  const std::size_t text_px = b.foreground_count();
  fill(b, 100, 300, 400, 2);
  SUBCASE("one ruling erased exactly") {
    const auto r = detect_rulings(b);
    REQUIRE(r.size() == 1);
    CHECK(remove_rulings(b, r).foreground_count() == text_px);
  }
  SUBCASE("empty list is the identity") { CHECK(remove_rulings(b, {}) == b); }
  SUBCASE("crossing rulings erase their union") {
    fill(b, 300, 100, 2, 400);
    const auto r = detect_rulings(b);
    REQUIRE(r.size() == 2);
    // Union of both pixel sets, shared pixels once.
    std::set<std::pair<int, int>> erased;
    for (const auto& rl : r)
      for (int y = int(rl.span.y); y < int(rl.span.bottom()); ++y)
        for (int x = int(rl.span.x); x < int(rl.span.right()); ++x)
          if (b.fg(x, y)) erased.insert({x, y});
    const BinaryImage out = remove_rulings(b, r);
    CHECK(out.foreground_count() == b.foreground_count() - erased.size());
    CHECK(out.foreground_count() == text_px);
  }
  SUBCASE("never creates foreground") {
    const BinaryImage out = remove_rulings(b, detect_rulings(b));
    for (std::size_t i = 0; i < out.pixels.size(); ++i) CHECK_FALSE((out.pixels[i] && !b.pixels[i]));
  }
}

TEST_CASE("connected components") {
  BinaryImage b(20, 10);
  fill(b, 1, 1, 3, 3);
  b.set(4, 4, true);  // diagonal neighbor joins the first component
  fill(b, 10, 2, 5, 2);
  std::vector<std::int32_t> labels;
  const auto cc = connected_components(b, &labels);
  REQUIRE(cc.size() == 2);
  CHECK(cc[0].bbox == Rect{1, 1, 4, 4});
  CHECK(cc[0].pixel_count == 10);
  CHECK(cc[1].bbox == Rect{10, 2, 5, 2});
  CHECK(labels[0] == -1);
  CHECK(labels[4 * 20 + 4] == 0);
  for (const auto& c : cc) CHECK(c.pixel_count <= c.bbox.area());
}

TEST_CASE("text / non-text classification") {
  BinaryImage b(800, 800);
  glyph_rows(b, 20, 20, 600, 6, 8);
  SUBCASE("glyph field is text") {
    for (const auto& c : classify_text_nontext(b)) CHECK(c.label == ComponentLabel::Text);
  }
  SUBCASE("solid region among glyphs is non-text") {
    fill(b, 300, 400, 300, 300);
    int nontext = 0;
    for (const auto& c : classify_text_nontext(b)) {
      if (c.label == ComponentLabel::NonText) {
        ++nontext;
        CHECK(c.bbox == Rect{300, 400, 300, 300});
      }
    }
    CHECK(nontext == 1);
  }
}

TEST_CASE("average character height") {
  auto comps = [](std::vector<double> hs) {
    std::vector<ConnectedComponent> out;
    for (double h : hs) out.push_back({{0, 0, 5, h}, 1, ComponentLabel::Text});
    return out;
  };
  CHECK(avg_char_height(comps({10, 10, 10})) == 10);
  CHECK(avg_char_height(comps({8, 10, 100})) == 10);
  std::vector<ConnectedComponent> none = {{{0, 0, 300, 300}, 90000, ComponentLabel::NonText}};
  CHECK_THROWS_AS(avg_char_height(none), NoTextContent);
}

TEST_CASE("arlsa linking") {
  SUBCASE("same height, gap 1.5h links") {
    BinaryImage b(200, 60);
    fill(b, 10, 10, 20, 10);
    fill(b, 45, 10, 20, 10);
    const auto comps = classify_text_nontext(b);
    const auto blocks = arlsa_blocks(b, comps);
    REQUIRE(blocks.size() == 1);
    CHECK(blocks[0].bbox == Rect{10, 10, 55, 10});
  }
  SUBCASE("height ratio 5 does not link") {
    std::vector<ConnectedComponent> comps = {{{10, 10, 20, 10}, 200, ComponentLabel::Text},
                                             {{32, 10, 20, 50}, 1000, ComponentLabel::Text}};
    BinaryImage b(200, 100);
    fill(b, 10, 10, 20, 10);
    fill(b, 32, 10, 20, 50);
    CHECK(arlsa_blocks(b, comps).size() == 2);
  }
  SUBCASE("blank page") { CHECK(arlsa_blocks(BinaryImage(50, 50), {}).empty()); }
}

TEST_CASE("generator pages survive the raster pipeline") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    SynthParams p;
    p.seed = seed;
    p.docs = 1;
    p.min_depth = 2;
    p.max_depth = 5;
    const PageAnnotation page = synth_corpus(p).pages[0];
    const GrayImage img = render_page(page);
    const PageAnnotation out = ingest_image(img, "x");
    CAPTURE(seed);

    REQUIRE(out.avg_char_height_doc.has_value());
    CHECK(std::abs(*out.avg_char_height_doc - p.char_height) <= 1);

    // Component labels against the generator's block kinds.
    const auto comps = classify_text_nontext(binarize_otsu(img).image);
    std::size_t agree = 0, seen = 0;
    for (const auto& c : comps) {
      for (const auto& b : page.blocks) {
        if (contains(b.bbox, c.bbox)) {
          ++seen;
          agree += (c.label == ComponentLabel::Text) == (b.kind == Kind::Text);
          break;
        }
      }
    }
    CHECK(seen == comps.size());
    CHECK(static_cast<double>(agree) >= 0.95 * static_cast<double>(seen));

    // Blocks within 2 px per edge of the generator's boxes.
    REQUIRE(out.blocks.size() == page.blocks.size());
    for (const auto& b : page.blocks) {
      const bool hit = std::any_of(out.blocks.begin(), out.blocks.end(), [&](const RawBlock& o) {
        return o.kind == b.kind && std::abs(o.bbox.x - b.bbox.x) <= 2 && std::abs(o.bbox.y - b.bbox.y) <= 2 &&
               std::abs(o.bbox.right() - b.bbox.right()) <= 2 && std::abs(o.bbox.bottom() - b.bbox.bottom()) <= 2;
      });
      CHECK(hit);
    }
  }
}

TEST_CASE("ingest is deterministic and rejects pages without text") {
  SynthParams p;
  p.seed = 9;
  p.docs = 1;
  p.min_depth = 2;
  p.max_depth = 3;
  const GrayImage img = render_page(synth_corpus(p).pages[0]);
  const PageAnnotation a = ingest_image(img, "a");
  const PageAnnotation b = ingest_image(img, "a");
  CHECK(a.blocks == b.blocks);
  CHECK(a.lines == b.lines);

  CHECK_THROWS_AS(ingest_image(GrayImage(100, 100, 255), "n"), NoTextContent);
}

TEST_CASE("block boxes are the bounding boxes of disjoint component sets") {
  BinaryImage b(400, 300);
  glyph_rows(b, 10, 10, 150, 4, 8);
  glyph_rows(b, 220, 10, 150, 4, 8);
  glyph_rows(b, 10, 150, 360, 3, 8);
  const auto comps = classify_text_nontext(b);
  const auto blocks = arlsa_blocks(b, comps);
  REQUIRE(blocks.size() == 3);
  std::vector<int> owner(comps.size(), -1);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    Rect u{};
    bool first = true;
    for (std::size_t c = 0; c < comps.size(); ++c) {
      if (!contains(blocks[i].bbox, comps[c].bbox)) continue;
      CHECK(owner[c] == -1);
      owner[c] = static_cast<int>(i);
      u = first ? comps[c].bbox : unite(u, comps[c].bbox);
      first = false;
    }
    CHECK(u == blocks[i].bbox);
  }
  CHECK(std::count(owner.begin(), owner.end(), -1) == 0);
}

}  // TEST_SUITE
