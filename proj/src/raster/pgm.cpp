#include <cctype>
#include <fstream>
#include <sstream>

#include "layoutsearch/error.hpp"
#include "layoutsearch/raster.hpp"

namespace layoutsearch {

GrayImage::GrayImage(int w, int h, std::uint8_t fill)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::string_view bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long number() {
    skip_space_and_comments();
    long v = 0;
    std::size_t start = pos_;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      v = v * 10 + (bytes_[pos_] - '0');
      if (v > (1L << 30)) throw InvalidInput("pgm: header value out of range");
      ++pos_;
    }
    if (pos_ == start) throw InvalidInput("pgm: malformed header");
    return v;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

GrayImage decode_pgm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2')) {
    throw InvalidInput("pgm: missing P5/P2 magic");
  }
  const bool binary = bytes[1] == '5';
  HeaderReader r(bytes);
  r.advance(2);
  const long w = r.number();
  const long h = r.number();
  const long maxval = r.number();
  if (w < 1 || h < 1) throw InvalidInput("pgm: empty image");
  if (maxval < 1 || maxval > 255) throw InvalidInput("pgm: only 8-bit images are supported");

  GrayImage img(static_cast<int>(w), static_cast<int>(h));
  const std::size_t count = img.pixels.size();
  if (binary) {
    r.advance(1);  // single whitespace after maxval
    if (bytes.size() < r.pos() + count) throw InvalidInput("pgm: truncated pixel data");
    for (std::size_t i = 0; i < count; ++i) {
      const long v = static_cast<unsigned char>(bytes[r.pos() + i]);
      img.pixels[i] = static_cast<std::uint8_t>(v * 255 / maxval);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      const long v = r.number();
      if (v > maxval) throw InvalidInput("pgm: sample exceeds maxval");
      img.pixels[i] = static_cast<std::uint8_t>(v * 255 / maxval);
    }
  }
  return img;
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open image: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_pgm(ss.str());
}

std::string encode_pgm(const GrayImage& img) {
  std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(img.pixels.data()), img.pixels.size());
  return out;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write image: " + path.string());
  out << encode_pgm(img);
}

}  // namespace layoutsearch
