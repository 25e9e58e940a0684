#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "layoutsearch/geometry.hpp"
#include "layoutsearch/index.hpp"
#include "layoutsearch/layout_graph.hpp"

namespace layoutsearch {

struct QueryBlock {
  Rect bbox;
  QueryKind kind = QueryKind::Any;
  bool operator==(const QueryBlock&) const = default;
};

struct DummyBlock {
  Rect bbox;
  std::size_t anchor = 0;  // index of the query block whose side exposed the vacancy
  Direction direction = Direction::Bottom;
  bool operator==(const DummyBlock&) const = default;
};

// Overlap allowed between two sketched blocks, as a fraction of the smaller one.
inline constexpr double kQueryOverlapTolerance = 0.05;
// A vacant strip deeper than this fraction of the anchor's dimension is a dummy.
inline constexpr double kVacancyFraction = 0.25;

// A sketched sub-layout. Node ids of the combined adjacency are block indices
// followed by dummy indices (dummy k is node blocks.size() + k).
struct QueryLayout {
  PageDims canvas;
  std::vector<QueryBlock> blocks;
  std::vector<DummyBlock> dummies;
  std::size_t reference = 0;
  Adjacency adjacency;
  int type = 1;

  std::size_t node_count() const { return blocks.size() + dummies.size(); }
  bool is_dummy(std::size_t node) const { return node >= blocks.size(); }
  Rect node_bbox(std::size_t node) const {
    return is_dummy(node) ? dummies[node - blocks.size()].bbox : blocks[node].bbox;
  }
  const std::vector<BlockId>& neighbors_of(std::size_t node, Direction d) const {
    return adjacency.neighbors[node][static_cast<std::size_t>(d)];
  }
};

// Validates blocks, derives dummies, adjacency, reference block and type.
// Throws QueryError on an empty layout, blocks outside the canvas, empty
// blocks, or overlaps beyond kQueryOverlapTolerance.
QueryLayout make_layout(const PageDims& canvas, std::vector<QueryBlock> blocks);

std::vector<DummyBlock> detect_vacancies(const PageDims& canvas, const std::vector<QueryBlock>& blocks);

// 1..6: kinds all specified / all "any" / mixed, without (1-3) or with (4-6) vacancies.
int query_type(const std::vector<QueryBlock>& blocks, bool has_vacancies);

std::size_t reference_block(const std::vector<QueryBlock>& blocks);

// Candidate descriptor of the reference block. Every document block from which
// match_sublayout can succeed satisfies it.
QueryDescriptor reference_descriptor(const QueryLayout& layout);

struct MatchResult {
  std::uint32_t doc = 0;  // position in the store
  std::string doc_id;
  Hypothesis hypothesis = Hypothesis::H1;
  std::vector<BlockId> block_map;               // per query block
  std::vector<std::vector<BlockId>> dummy_map;  // per dummy, sorted
  Rect match_bbox;
  double score = 0;

  bool operator==(const MatchResult&) const = default;
};

// Upper bound on search nodes per start; searches beyond it report no match.
inline constexpr std::size_t kMatchStepLimit = 20000;

std::optional<MatchResult> match_sublayout(const QueryLayout& layout, const LayoutGraph& graph, BlockId start);

double rank_score(const QueryLayout& layout, const MatchResult& match, const LayoutGraph& graph);

struct RetrieveOptions {
  bool use_hash = true;
  bool parallel = true;
};

std::vector<MatchResult> retrieve(const CorpusStore& store, const QueryLayout& layout, RetrieveOptions opts = {});
std::vector<MatchResult> retrieve_serial(const CorpusStore& store, const QueryLayout& layout);
// Every block of every indexed hypothesis graph as a start.
std::vector<MatchResult> brute_force_retrieve(const CorpusStore& store, const QueryLayout& layout);

// Candidate starts the hashed path would try.
std::vector<Candidate> query_candidates(const CorpusStore& store, const QueryLayout& layout);

bool region_predicate(const Rect& match_bbox, const PageDims& page, std::optional<Location> region);

// Boolean expression over named sub-layouts.
struct BoolExpr {
  enum class Op { Atom, And, Or, Not };
  Op op = Op::Atom;
  std::string name;
  std::optional<Location> region;
  std::vector<std::unique_ptr<BoolExpr>> children;
};

// Throws QueryError with the offending position on syntax errors.
std::unique_ptr<BoolExpr> parse_expression(const std::string& text);
bool has_positive_atom(const BoolExpr& e);
std::string to_string(const BoolExpr& e);

struct BooleanQuery {
  PageDims canvas;
  std::map<std::string, QueryLayout> layouts;
  std::unique_ptr<BoolExpr> expr;
};

// Parses the query JSON document. Throws QueryError.
BooleanQuery parse_query(const std::string& text);

struct AtomMatch {
  std::string layout;
  MatchResult match;
};

struct DocumentHit {
  std::string doc_id;
  std::optional<double> score;  // best positive-atom match, absent when none contributes
  std::vector<AtomMatch> matches;
};

// `top` == 0 keeps every hit.
std::vector<DocumentHit> evaluate_boolean(const CorpusStore& store, const BooleanQuery& q, RetrieveOptions opts = {},
                                          std::size_t top = 0);

}  // namespace layoutsearch
