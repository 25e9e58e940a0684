#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "layoutsearch/geometry.hpp"
#include "layoutsearch/raster.hpp"

namespace layoutsearch {

// Horizontal ruling kept after raster cleanup; blocks it separates are never
// merged by symmetry maximization.
struct HorizontalLine {
  double y = 0;
  double x0 = 0;
  double x1 = 0;
  bool operator==(const HorizontalLine&) const = default;
};

enum class Hypothesis : std::uint8_t { H1 = 0, H2 = 1, H3 = 2, H4 = 3 };
inline constexpr int kHypothesisCount = 4;
inline constexpr std::array<Hypothesis, 4> kHypotheses = {Hypothesis::H1, Hypothesis::H2,
                                                          Hypothesis::H3, Hypothesis::H4};

std::string_view to_string(Hypothesis h);
std::optional<Hypothesis> parse_hypothesis(std::string_view s);

using BlockId = std::uint32_t;

struct Block {
  BlockId id = 0;
  Rect bbox;
  Kind kind = Kind::Text;
  double avg_char_height_block = 0;
  Location location = Location::Center;

  double width() const { return bbox.w; }
  double height() const { return bbox.h; }
  bool operator==(const Block&) const = default;
};

using NeighborLists = std::array<std::vector<BlockId>, 4>;  // indexed by Direction
using OverlapFlags = std::array<bool, 4>;

// Blocks of one document under one segmentation hypothesis. Block ids are
// dense: blocks[i].id == i, ordered by (y, x) of the top-left corner.
struct LayoutGraph {
  std::string doc_id;
  Hypothesis hypothesis = Hypothesis::H1;
  PageDims page;
  double avg_char_height_doc = 0;
  std::vector<Block> blocks;
  std::vector<NeighborLists> neighbors;
  std::vector<OverlapFlags> overlaps;

  std::size_t size() const { return blocks.size(); }
  const std::vector<BlockId>& neighbors_of(BlockId id, Direction d) const {
    return neighbors[id][static_cast<std::size_t>(d)];
  }
  bool operator==(const LayoutGraph&) const = default;
};

// Everything the graph stage needs about one page: raster output or a
// pre-segmented annotation.
struct PageAnnotation {
  std::string doc_id;
  PageDims page;
  std::optional<double> avg_char_height_doc;  // derived from text blocks when absent
  std::vector<RawBlock> blocks;
  std::vector<HorizontalLine> lines;
};

struct Adjacency {
  std::vector<NeighborLists> neighbors;
  std::vector<OverlapFlags> overlaps;
};

// Visibility adjacency over arbitrary rectangles. b is a right neighbor of a
// iff their vertical projections overlap, b.x >= a.cx, a.right <= b.cx, and
// among the rectangles lying between the two (c.x >= a.cx, c.right <= b.cx,
// vertically overlapping a) none touches the shared vertical interval and
// they do not bracket it from above and below. Lists are ordered by the
// perpendicular coordinate.
Adjacency compute_adjacency(std::span<const Rect> rects);

// Renumbers blocks in (y, x) order and computes their adjacency. Throws
// InvalidInput on duplicate ids.
LayoutGraph build_adjacency(std::vector<Block> blocks, const PageDims& page);

LayoutGraph graph_from_raw(std::span<const RawBlock> raw, const PageDims& page,
                           double avg_char_height_doc, std::string doc_id = {});

struct GroupingTolerances {
  double align_min_px = 3.0;
  double align_char_fraction = 0.25;
  double char_height_rel = 0.2;
};

double alignment_tolerance(double avg_char_height_doc, const GroupingTolerances& tol = {});
bool same_char_height(double a, double b, const GroupingTolerances& tol = {});

// True when vertically stacked `upper` and `lower` may be merged: both text,
// left/right/center aligned, same character height, gap below the document
// character height, and no horizontal line in between.
bool symmetry_mergeable(const Block& upper, const Block& lower, std::span<const HorizontalLine> lines,
                        double avg_char_height_doc);

// Merges the pair into one text block (union box, area-weighted character height).
RawBlock merge_text_blocks(const Block& a, const Block& b);

LayoutGraph symmetry_maximize(const LayoutGraph& graph, std::span<const HorizontalLine> lines,
                              double avg_char_height_doc);

LayoutGraph hypothesis_remove_small(const LayoutGraph& graph);
LayoutGraph hypothesis_merge_nontext(const LayoutGraph& graph, double avg_char_height_doc);
LayoutGraph hypothesis_remove_captions(const LayoutGraph& graph, double avg_char_height_doc);

double derive_avg_char_height(std::span<const RawBlock> blocks);

// [H1, H2, H3, H4]; H2..H4 each transform H1 independently.
std::array<LayoutGraph, 4> build_all_hypotheses(const PageAnnotation& page);

std::vector<RawBlock> to_raw_blocks(const LayoutGraph& graph);

}  // namespace layoutsearch
