#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace layoutsearch {

// Axis-aligned rectangle. Page coordinates are whole pixels stored as double so
// the same type carries query-canvas units.
struct Rect {
  double x = 0;
  double y = 0;
  double w = 0;
  double h = 0;

  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double cx() const { return x + w / 2; }
  double cy() const { return y + h / 2; }
  double area() const { return w * h; }
  bool empty() const { return w <= 0 || h <= 0; }

  bool operator==(const Rect&) const = default;
  auto operator<=>(const Rect&) const = default;
};

inline Rect unite(const Rect& a, const Rect& b) {
  double x0 = std::min(a.x, b.x);
  double y0 = std::min(a.y, b.y);
  double x1 = std::max(a.right(), b.right());
  double y1 = std::max(a.bottom(), b.bottom());
  return {x0, y0, x1 - x0, y1 - y0};
}

inline double intersection_area(const Rect& a, const Rect& b) {
  double w = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  double h = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  return (w > 0 && h > 0) ? w * h : 0.0;
}

inline bool intersects(const Rect& a, const Rect& b) { return intersection_area(a, b) > 0; }

inline bool contains(const Rect& outer, const Rect& inner) {
  return inner.x >= outer.x && inner.y >= outer.y && inner.right() <= outer.right() &&
         inner.bottom() <= outer.bottom();
}

struct PageDims {
  double w = 0;
  double h = 0;
  bool operator==(const PageDims&) const = default;
};

enum class Kind : std::uint8_t { Text = 0, NonText = 1 };

// Kind constraint of a sketched block.
enum class QueryKind : std::uint8_t { Text = 0, NonText = 1, Any = 2 };

inline bool kind_compatible(QueryKind q, Kind k) {
  return q == QueryKind::Any || static_cast<std::uint8_t>(q) == static_cast<std::uint8_t>(k);
}

enum class Direction : std::uint8_t { Top = 0, Bottom = 1, Left = 2, Right = 3 };
inline constexpr std::array<Direction, 4> kDirections = {Direction::Top, Direction::Bottom,
                                                         Direction::Left, Direction::Right};

inline Direction opposite(Direction d) {
  switch (d) {
    case Direction::Top: return Direction::Bottom;
    case Direction::Bottom: return Direction::Top;
    case Direction::Left: return Direction::Right;
    case Direction::Right: return Direction::Left;
  }
  return d;
}

// Coarse page position. Codes double as the location field of the context key.
enum class Location : std::uint8_t { Top = 0, Bottom = 1, Left = 2, Right = 3, Center = 4 };

std::string_view to_string(Kind k);
std::string_view to_string(QueryKind k);
std::string_view to_string(Direction d);
std::string_view to_string(Location l);

std::optional<Kind> parse_kind(std::string_view s);
std::optional<QueryKind> parse_query_kind(std::string_view s);
std::optional<Location> parse_location(std::string_view s);

// Quantizes the centroid of `box` on the page: center when both normalized
// coordinates are in [1/3, 2/3], otherwise the direction of largest
// displacement from the page center (vertical wins ties).
Location spatial_location(const Rect& box, const PageDims& page);

}  // namespace layoutsearch
