#include "layoutsearch/geometry.hpp"

#include <cmath>

namespace layoutsearch {

std::string_view to_string(Kind k) { return k == Kind::Text ? "text" : "nontext"; }

std::string_view to_string(QueryKind k) {
  switch (k) {
    case QueryKind::Text: return "text";
    case QueryKind::NonText: return "nontext";
    case QueryKind::Any: return "any";
  }
  return "any";
}

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::Top: return "top";
    case Direction::Bottom: return "bottom";
    case Direction::Left: return "left";
    case Direction::Right: return "right";
  }
  return "top";
}

std::string_view to_string(Location l) {
  switch (l) {
    case Location::Top: return "top";
    case Location::Bottom: return "bottom";
    case Location::Left: return "left";
    case Location::Right: return "right";
    case Location::Center: return "center";
  }
  return "center";
}

std::optional<Kind> parse_kind(std::string_view s) {
  if (s == "text") return Kind::Text;
  if (s == "nontext") return Kind::NonText;
  return std::nullopt;
}

std::optional<QueryKind> parse_query_kind(std::string_view s) {
  if (s == "text") return QueryKind::Text;
  if (s == "nontext") return QueryKind::NonText;
  if (s == "any") return QueryKind::Any;
  return std::nullopt;
}

std::optional<Location> parse_location(std::string_view s) {
  if (s == "top") return Location::Top;
  if (s == "bottom") return Location::Bottom;
  if (s == "left") return Location::Left;
  if (s == "right") return Location::Right;
  if (s == "center") return Location::Center;
  return std::nullopt;
}

Location spatial_location(const Rect& box, const PageDims& page) {
  // Work with doubled centroids so integer inputs stay exact and the result is
  // invariant under uniform scaling.
  const double cx2 = 2 * box.x + box.w;
  const double cy2 = 2 * box.y + box.h;
  const bool u_mid = 3 * cx2 >= 2 * page.w && 3 * cx2 <= 4 * page.w;
  const bool v_mid = 3 * cy2 >= 2 * page.h && 3 * cy2 <= 4 * page.h;
  if (u_mid && v_mid) return Location::Center;

  // |v - 1/2| vs |u - 1/2|, cross-multiplied by 2W*2H.
  const double dv = std::abs(cy2 - page.h) * page.w;
  const double du = std::abs(cx2 - page.w) * page.h;
  if (dv >= du) return cy2 < page.h ? Location::Top : Location::Bottom;
  return cx2 < page.w ? Location::Left : Location::Right;
}

}  // namespace layoutsearch
