#include <boost/multiprecision/cpp_int.hpp>

#include "layoutsearch/raster.hpp"

namespace layoutsearch {

namespace {

using boost::multiprecision::int256_t;

// Between-class variance up to the constant factor 1/N^2, kept as the exact
// fraction num/den = (N*S0 - n0*S)^2 / (n0*n1).
struct Variance {
  int256_t num;
  int256_t den;
};

bool greater(const Variance& a, const Variance& b) { return a.num * b.den > b.num * a.den; }

}  // namespace

OtsuThreshold otsu_threshold(const Histogram& hist) {
  std::int64_t total = 0;
  std::int64_t total_sum = 0;
  int populated = 0;
  int only_level = 0;
  for (int i = 0; i < 256; ++i) {
    total += static_cast<std::int64_t>(hist[i]);
    total_sum += static_cast<std::int64_t>(hist[i]) * i;
    if (hist[i] > 0) {
      ++populated;
      only_level = i;
    }
  }
  if (populated <= 1) return {only_level, true};

  std::int64_t n0 = 0;
  std::int64_t s0 = 0;
  bool have_best = false;
  Variance best;
  int best_t = 0;
  for (int t = 0; t < 255; ++t) {
    n0 += static_cast<std::int64_t>(hist[t]);
    s0 += static_cast<std::int64_t>(hist[t]) * t;
    const std::int64_t n1 = total - n0;
    if (n0 == 0 || n1 == 0) continue;
    int256_t d = int256_t(total) * s0 - int256_t(n0) * total_sum;
    Variance v{d * d, int256_t(n0) * n1};
    if (!have_best || greater(v, best)) {
      best = v;
      best_t = t;
      have_best = true;
    }
  }
  return {best_t, false};
}

Binarization binarize_otsu(const GrayImage& img) {
  Histogram hist{};
  for (auto p : img.pixels) ++hist[p];
  const OtsuThreshold t = otsu_threshold(hist);

  Binarization out;
  out.image = BinaryImage(img.width, img.height);
  out.threshold = t.threshold;
  out.degenerate = t.degenerate;
  if (t.degenerate) return out;
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    out.image.pixels[i] = img.pixels[i] <= t.threshold ? 1 : 0;
  }
  return out;
}

std::size_t BinaryImage::foreground_count() const {
  std::size_t n = 0;
  for (auto p : pixels) n += p != 0;
  return n;
}

}  // namespace layoutsearch
