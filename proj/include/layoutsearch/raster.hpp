#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "layoutsearch/geometry.hpp"

namespace layoutsearch {

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 255);

  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

// 1 = foreground (ink), 0 = background.
struct BinaryImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  BinaryImage() = default;
  BinaryImage(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, 0) {}

  bool fg(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v) { pixels[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
  std::size_t foreground_count() const;

  bool operator==(const BinaryImage&) const = default;
};

GrayImage decode_pgm(std::string_view bytes);
GrayImage read_pgm(const std::filesystem::path& path);
std::string encode_pgm(const GrayImage& img);
void write_pgm(const std::filesystem::path& path, const GrayImage& img);

using Histogram = std::array<std::uint64_t, 256>;

struct OtsuThreshold {
  int threshold = 0;
  bool degenerate = false;  // single populated intensity: no split exists
};

// Smallest threshold maximizing between-class variance, where class 0 holds
// intensities <= threshold. Ties are resolved exactly, not by float epsilon.
OtsuThreshold otsu_threshold(const Histogram& hist);

struct Binarization {
  BinaryImage image;
  int threshold = 0;
  bool degenerate = false;
};

// Dark-on-light polarity: foreground = intensity <= threshold. A constant
// image comes back all-background with the degenerate flag set.
Binarization binarize_otsu(const GrayImage& img);

enum class Orientation : std::uint8_t { Horizontal, Vertical };

struct Ruling {
  Orientation orientation = Orientation::Horizontal;
  Rect span;
  bool operator==(const Ruling&) const = default;
};

std::vector<Ruling> detect_rulings(const BinaryImage& bin);
BinaryImage remove_rulings(const BinaryImage& bin, std::span<const Ruling> rulings);

enum class ComponentLabel : std::uint8_t { Text, NonText, Unknown };

struct ConnectedComponent {
  Rect bbox;
  std::size_t pixel_count = 0;
  ComponentLabel label = ComponentLabel::Unknown;
};

// 8-connected components in raster order of their first pixel. When `labels`
// is non-null it receives a per-pixel component index (-1 for background).
std::vector<ConnectedComponent> connected_components(const BinaryImage& bin,
                                                     std::vector<std::int32_t>* labels = nullptr);

std::vector<ConnectedComponent> classify_text_nontext(const BinaryImage& bin);

// Median height of the text components; throws NoTextContent if there are none.
double avg_char_height(std::span<const ConnectedComponent> components);

struct ArlsaParams {
  double gap_factor = 3.0;    // a: max gap as a multiple of the smaller height
  double height_ratio = 3.5;  // r: max ratio between the two heights
};

struct RawBlock {
  Rect bbox;
  Kind kind = Kind::Text;
  double avg_char_height_block = 0;
  bool operator==(const RawBlock&) const = default;
};

std::vector<RawBlock> arlsa_blocks(const BinaryImage& bin,
                                   std::span<const ConnectedComponent> components,
                                   const ArlsaParams& params = {});

}  // namespace layoutsearch
