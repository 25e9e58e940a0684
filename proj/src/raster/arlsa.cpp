#include <algorithm>
#include <numeric>

#include "layoutsearch/raster.hpp"
#include "raster_internal.hpp"

namespace layoutsearch {

namespace {

double overlap_1d(double a0, double a1, double b0, double b1) {
  return std::min(a1, b1) - std::max(a0, b0);
}

bool heights_compatible(double h1, double h2, double ratio) {
  const double lo = std::min(h1, h2);
  const double hi = std::max(h1, h2);
  return lo > 0 && hi <= ratio * lo;
}

struct Region {
  Rect bbox;
  std::vector<std::size_t> members;  // component indices
};

}  // namespace

std::vector<RawBlock> arlsa_blocks(const BinaryImage& /*bin*/,
                                   std::span<const ConnectedComponent> components,
                                   const ArlsaParams& params) {
  std::vector<std::size_t> text;
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (components[i].label != ComponentLabel::NonText) text.push_back(i);
  }

  // Horizontal smearing: link components on the same line.
  std::sort(text.begin(), text.end(), [&](std::size_t a, std::size_t b) {
    return components[a].bbox.x < components[b].bbox.x ||
           (components[a].bbox.x == components[b].bbox.x && a < b);
  });
  DisjointSet lines(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const Rect& a = components[text[i]].bbox;
    for (std::size_t j = i + 1; j < text.size(); ++j) {
      const Rect& b = components[text[j]].bbox;
      if (b.x - a.right() > params.gap_factor * a.h) break;
      if (overlap_1d(a.y, a.bottom(), b.y, b.bottom()) <= 0) continue;
      if (!heights_compatible(a.h, b.h, params.height_ratio)) continue;
      if (b.x - a.right() <= params.gap_factor * std::min(a.h, b.h)) lines.unite(i, j);
    }
  }

  struct Line {
    Rect bbox;
    double char_height = 0;
    std::vector<std::size_t> members;
  };
  std::vector<Line> line_groups;
  {
    std::vector<std::ptrdiff_t> slot(text.size(), -1);
    for (std::size_t i = 0; i < text.size(); ++i) {
      const std::size_t root = lines.find(i);
      if (slot[root] < 0) {
        slot[root] = static_cast<std::ptrdiff_t>(line_groups.size());
        line_groups.push_back({components[text[i]].bbox, 0, {}});
      }
      auto& g = line_groups[static_cast<std::size_t>(slot[root])];
      g.bbox = unite(g.bbox, components[text[i]].bbox);
      g.members.push_back(text[i]);
    }
    for (auto& g : line_groups) {
      std::vector<double> hs;
      for (auto m : g.members) hs.push_back(components[m].bbox.h);
      g.char_height = lower_median(std::move(hs));
    }
  }

  // Vertical smearing between lines.
  DisjointSet paragraphs(line_groups.size());
  for (std::size_t i = 0; i < line_groups.size(); ++i) {
    for (std::size_t j = i + 1; j < line_groups.size(); ++j) {
      const auto& a = line_groups[i];
      const auto& b = line_groups[j];
      if (overlap_1d(a.bbox.x, a.bbox.right(), b.bbox.x, b.bbox.right()) <= 0) continue;
      if (!heights_compatible(a.char_height, b.char_height, params.height_ratio)) continue;
      const double gap = std::max(b.bbox.y - a.bbox.bottom(), a.bbox.y - b.bbox.bottom());
      if (gap <= params.gap_factor * std::min(a.char_height, b.char_height)) paragraphs.unite(i, j);
    }
  }

  std::vector<Region> regions;
  {
    std::vector<std::ptrdiff_t> slot(line_groups.size(), -1);
    for (std::size_t i = 0; i < line_groups.size(); ++i) {
      const std::size_t root = paragraphs.find(i);
      if (slot[root] < 0) {
        slot[root] = static_cast<std::ptrdiff_t>(regions.size());
        regions.push_back({line_groups[i].bbox, {}});
      }
      auto& r = regions[static_cast<std::size_t>(slot[root])];
      r.bbox = unite(r.bbox, line_groups[i].bbox);
      r.members.insert(r.members.end(), line_groups[i].members.begin(), line_groups[i].members.end());
    }
  }
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (components[i].label == ComponentLabel::NonText) regions.push_back({components[i].bbox, {i}});
  }

  // Minimum bounding rectangles that overlap are fused (the known limitation
  // for interleaved text regions).
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < regions.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < regions.size(); ++j) {
        if (!intersects(regions[i].bbox, regions[j].bbox)) continue;
        regions[i].bbox = unite(regions[i].bbox, regions[j].bbox);
        regions[i].members.insert(regions[i].members.end(), regions[j].members.begin(),
                                  regions[j].members.end());
        regions.erase(regions.begin() + static_cast<std::ptrdiff_t>(j));
        changed = true;
        break;
      }
    }
  }

  std::vector<RawBlock> out;
  out.reserve(regions.size());
  for (const auto& r : regions) {
    std::size_t text_mass = 0;
    std::size_t nontext_mass = 0;
    std::vector<double> heights;
    for (auto m : r.members) {
      if (components[m].label == ComponentLabel::NonText) {
        nontext_mass += components[m].pixel_count;
      } else {
        text_mass += components[m].pixel_count;
        heights.push_back(components[m].bbox.h);
      }
    }
    RawBlock b;
    b.bbox = r.bbox;
    b.kind = text_mass > nontext_mass ? Kind::Text : Kind::NonText;
    b.avg_char_height_block = lower_median(std::move(heights));
    out.push_back(b);
  }
  std::sort(out.begin(), out.end(), [](const RawBlock& a, const RawBlock& b) {
    return std::tie(a.bbox.y, a.bbox.x, a.bbox.w, a.bbox.h) <
           std::tie(b.bbox.y, b.bbox.x, b.bbox.w, b.bbox.h);
  });
  return out;
}

}  // namespace layoutsearch
