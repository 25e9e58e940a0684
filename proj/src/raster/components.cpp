#include <algorithm>
#include <numeric>

#include "layoutsearch/error.hpp"
#include "layoutsearch/raster.hpp"
#include "raster_internal.hpp"

namespace layoutsearch {

std::vector<ConnectedComponent> connected_components(const BinaryImage& bin,
                                                     std::vector<std::int32_t>* labels) {
  const int w = bin.width;
  const int h = bin.height;
  std::vector<std::int32_t> label(static_cast<std::size_t>(w) * h, -1);
  std::vector<ConnectedComponent> out;
  std::vector<std::pair<int, int>> stack;

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      if (!bin.pixels[idx] || label[idx] >= 0) continue;

      const auto id = static_cast<std::int32_t>(out.size());
      int x0 = x, x1 = x, y0 = y, y1 = y;
      std::size_t count = 0;
      label[idx] = id;
      stack.clear();
      stack.emplace_back(x, y);
      while (!stack.empty()) {
        auto [px, py] = stack.back();
        stack.pop_back();
        ++count;
        x0 = std::min(x0, px);
        x1 = std::max(x1, px);
        y0 = std::min(y0, py);
        y1 = std::max(y1, py);
        for (int dy = -1; dy <= 1; ++dy) {
          const int ny = py + dy;
          if (ny < 0 || ny >= h) continue;
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = px + dx;
            if (nx < 0 || nx >= w) continue;
            const std::size_t n = static_cast<std::size_t>(ny) * w + nx;
            if (bin.pixels[n] && label[n] < 0) {
              label[n] = id;
              stack.emplace_back(nx, ny);
            }
          }
        }
      }
      ConnectedComponent cc;
      cc.bbox = Rect{double(x0), double(y0), double(x1 - x0 + 1), double(y1 - y0 + 1)};
      cc.pixel_count = count;
      out.push_back(cc);
    }
  }
  if (labels) *labels = std::move(label);
  return out;
}

double lower_median(std::vector<double> values) {
  if (values.empty()) return 0;
  auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

double avg_char_height(std::span<const ConnectedComponent> components) {
  std::vector<double> heights;
  for (const auto& c : components) {
    if (c.label == ComponentLabel::Text) heights.push_back(c.bbox.h);
  }
  if (heights.empty()) throw NoTextContent();
  return lower_median(std::move(heights));
}

}  // namespace layoutsearch
