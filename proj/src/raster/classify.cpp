#include <cmath>

#include "layoutsearch/raster.hpp"
#include "raster_internal.hpp"

namespace layoutsearch {

namespace {

constexpr double kTallFactor = 4.0;     // height > 4 * ach
constexpr double kSolidDensity = 0.9;   // fill density of a solid block
constexpr double kSolidSide = 4.0;      // ... with area > (4 * ach)^2
constexpr double kOpeningSide = 2.0;    // structuring element side, in ach
constexpr double kSurvivorSide = 6.0;   // surviving region area > (6 * ach)^2

class IntegralImage {
 public:
  explicit IntegralImage(const BinaryImage& img)
      : w_(img.width), h_(img.height), sum_(static_cast<std::size_t>(w_ + 1) * (h_ + 1), 0) {
    for (int y = 0; y < h_; ++y) {
      std::int64_t row = 0;
      for (int x = 0; x < w_; ++x) {
        row += img.fg(x, y);
        sum_[idx(x + 1, y + 1)] = sum_[idx(x + 1, y)] + row;
      }
    }
  }

  // Foreground count in [x0, x1) x [y0, y1), clipped to the image.
  std::int64_t count(int x0, int y0, int x1, int y1) const {
    x0 = std::clamp(x0, 0, w_);
    x1 = std::clamp(x1, 0, w_);
    y0 = std::clamp(y0, 0, h_);
    y1 = std::clamp(y1, 0, h_);
    if (x0 >= x1 || y0 >= y1) return 0;
    return sum_[idx(x1, y1)] - sum_[idx(x0, y1)] - sum_[idx(x1, y0)] + sum_[idx(x0, y0)];
  }

 private:
  std::size_t idx(int x, int y) const { return static_cast<std::size_t>(y) * (w_ + 1) + x; }
  int w_;
  int h_;
  std::vector<std::int64_t> sum_;
};

// Morphological opening with a side x side square (pixels outside the image
// count as background).
BinaryImage open_square(const BinaryImage& bin, int side) {
  const int lo = (side - 1) / 2;
  const int hi = side - lo;
  const std::int64_t full = static_cast<std::int64_t>(side) * side;

  IntegralImage src(bin);
  BinaryImage eroded(bin.width, bin.height);
  for (int y = 0; y < bin.height; ++y) {
    for (int x = 0; x < bin.width; ++x) {
      eroded.set(x, y, src.count(x - lo, y - lo, x + hi, y + hi) == full);
    }
  }
  IntegralImage er(eroded);
  BinaryImage opened(bin.width, bin.height);
  for (int y = 0; y < bin.height; ++y) {
    for (int x = 0; x < bin.width; ++x) {
      opened.set(x, y, er.count(x - hi + 1, y - hi + 1, x + lo + 1, y + lo + 1) > 0);
    }
  }
  return opened;
}

}  // namespace

std::vector<ConnectedComponent> classify_text_nontext(const BinaryImage& bin) {
  std::vector<std::int32_t> labels;
  auto comps = connected_components(bin, &labels);
  if (comps.empty()) return comps;

  std::vector<double> heights;
  heights.reserve(comps.size());
  for (const auto& c : comps) heights.push_back(c.bbox.h);
  const double ach = lower_median(std::move(heights));

  // Regions thick enough to survive an opening at twice the character scale.
  const int side = std::max(1, static_cast<int>(std::lround(kOpeningSide * ach)));
  std::vector<std::int32_t> region_labels;
  const BinaryImage opened = open_square(bin, side);
  const auto regions = connected_components(opened, &region_labels);
  const double survivor_area = (kSurvivorSide * ach) * (kSurvivorSide * ach);
  std::vector<bool> survives(comps.size(), false);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto r = region_labels[i];
    if (r >= 0 && labels[i] >= 0 &&
        static_cast<double>(regions[static_cast<std::size_t>(r)].pixel_count) > survivor_area) {
      survives[static_cast<std::size_t>(labels[i])] = true;
    }
  }

  const double solid_area = (kSolidSide * ach) * (kSolidSide * ach);
  for (std::size_t i = 0; i < comps.size(); ++i) {
    auto& c = comps[i];
    const double density = static_cast<double>(c.pixel_count) / c.bbox.area();
    const bool nontext = c.bbox.h > kTallFactor * ach ||
                         (density > kSolidDensity && c.bbox.area() > solid_area) || survives[i];
    c.label = nontext ? ComponentLabel::NonText : ComponentLabel::Text;
  }
  return comps;
}

}  // namespace layoutsearch
