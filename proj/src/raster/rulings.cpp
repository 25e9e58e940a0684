#include <algorithm>
#include <cmath>
#include <numeric>

#include "layoutsearch/raster.hpp"
#include "raster_internal.hpp"

namespace layoutsearch {

namespace {

constexpr double kElongation = 20.0;     // long side / short side
constexpr double kMinLengthChars = 10.0;  // long side / average char height
constexpr int kMinRunFloor = 20;

struct Run {
  int line;  // row for horizontal runs, column for vertical runs
  int begin;
  int end;  // exclusive
};

// Character height estimate from components that are not themselves line-like.
double char_height_estimate(const BinaryImage& bin) {
  std::vector<double> heights;
  for (const auto& cc : connected_components(bin)) {
    const double lo = std::min(cc.bbox.w, cc.bbox.h);
    const double hi = std::max(cc.bbox.w, cc.bbox.h);
    if (hi < kElongation * lo) heights.push_back(cc.bbox.h);
  }
  return lower_median(std::move(heights));
}

// Groups long runs along one axis into line candidates. `lines` counts the
// rows (or columns) scanned, `along` is their length; fg(line, pos) reads a pixel.
template <typename Fg>
std::vector<Rect> long_run_groups(int lines, int along, int min_run, bool horizontal, Fg fg) {
  std::vector<Run> runs;
  std::vector<std::size_t> line_start(static_cast<std::size_t>(lines) + 1, 0);
  for (int l = 0; l < lines; ++l) {
    line_start[l] = runs.size();
    int p = 0;
    while (p < along) {
      if (!fg(l, p)) {
        ++p;
        continue;
      }
      int q = p;
      while (q < along && fg(l, q)) ++q;
      if (q - p >= min_run) runs.push_back({l, p, q});
      p = q;
    }
  }
  line_start[lines] = runs.size();

  DisjointSet ds(runs.size());
  for (int l = 1; l < lines; ++l) {
    std::size_t i = line_start[l - 1];
    std::size_t j = line_start[l];
    while (i < line_start[l] && j < line_start[l + 1]) {
      if (runs[i].end > runs[j].begin && runs[j].end > runs[i].begin) ds.unite(i, j);
      if (runs[i].end < runs[j].end) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  std::vector<Rect> groups;
  std::vector<std::ptrdiff_t> slot(runs.size(), -1);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::size_t root = ds.find(i);
    Rect r = horizontal ? Rect{double(runs[i].begin), double(runs[i].line),
                               double(runs[i].end - runs[i].begin), 1.0}
                        : Rect{double(runs[i].line), double(runs[i].begin), 1.0,
                               double(runs[i].end - runs[i].begin)};
    if (slot[root] < 0) {
      slot[root] = static_cast<std::ptrdiff_t>(groups.size());
      groups.push_back(r);
    } else {
      auto& g = groups[static_cast<std::size_t>(slot[root])];
      g = unite(g, r);
    }
  }
  return groups;
}

}  // namespace

std::vector<Ruling> detect_rulings(const BinaryImage& bin) {
  const double ach = char_height_estimate(bin);
  const int min_run = std::max(kMinRunFloor, static_cast<int>(std::ceil(kMinLengthChars * ach)));

  std::vector<Ruling> out;
  auto horizontal = long_run_groups(bin.height, bin.width, min_run, true,
                                    [&](int row, int col) { return bin.fg(col, row); });
  for (const auto& g : horizontal) {
    if (g.w >= kElongation * g.h && g.w >= kMinLengthChars * ach) {
      out.push_back({Orientation::Horizontal, g});
    }
  }
  auto vertical = long_run_groups(bin.width, bin.height, min_run, false,
                                  [&](int col, int row) { return bin.fg(col, row); });
  for (const auto& g : vertical) {
    if (g.h >= kElongation * g.w && g.h >= kMinLengthChars * ach) {
      out.push_back({Orientation::Vertical, g});
    }
  }
  std::sort(out.begin(), out.end(), [](const Ruling& a, const Ruling& b) {
    if (a.orientation != b.orientation) return a.orientation < b.orientation;
    return a.span < b.span;
  });
  return out;
}

BinaryImage remove_rulings(const BinaryImage& bin, std::span<const Ruling> rulings) {
  BinaryImage out = bin;
  for (const auto& r : rulings) {
    const int x0 = std::max(0, static_cast<int>(r.span.x));
    const int y0 = std::max(0, static_cast<int>(r.span.y));
    const int x1 = std::min(bin.width, static_cast<int>(r.span.right()));
    const int y1 = std::min(bin.height, static_cast<int>(r.span.bottom()));
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) out.set(x, y, false);
    }
  }
  return out;
}

}  // namespace layoutsearch
