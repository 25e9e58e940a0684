#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "layoutsearch/index.hpp"
#include "layoutsearch/query.hpp"
#include "layoutsearch/raster.hpp"

namespace layoutsearch {

struct NamedLayout {
  std::string name;
  QueryLayout layout;
};

struct SynthParams {
  std::uint64_t seed = 1;
  std::size_t docs = 100;
  PageDims page{2400, 3200};
  double char_height = 8;  // glyph height; text blocks are at least 3x this tall
  // Gutter between blocks, in character heights. Rendered pages keep blocks
  // apart only while this exceeds the ARLSA gap factor.
  double gutter_chars = 4;
  // Guillotine tree levels; 1 leaves the page as a single block.
  int min_depth = 4;
  int max_depth = 6;
  double nontext_prob = 0.3;
  // Plantings: each document receives one instance of plant[i] with
  // probability plant_rate (round-robin over plant when plant_rate >= 1).
  std::vector<NamedLayout> plant;
  double plant_rate = 0;
  // Per planting, probability of adding a hypothesis-targeted decoy inside it.
  double decoy_rate = 0;
  // Per document, expected number of decoys added to background blocks.
  double background_decoys = 0;
};

enum class DecoyKind : std::uint8_t { SmallBlock, Caption, SplitNonText };
std::string_view to_string(DecoyKind k);

struct Planting {
  std::string doc_id;
  std::string layout;                    // name from SynthParams::plant
  std::vector<Rect> blocks;              // page box of each query block
  std::vector<std::vector<Rect>> fills;  // blocks placed in each dummy's region
  double sx = 1, sy = 1, tx = 0, ty = 0;  // canvas -> page map
  std::vector<DecoyKind> decoys;
};

struct GroundTruth {
  std::vector<Planting> plantings;
};

struct SynthCorpus {
  std::vector<PageAnnotation> pages;
  GroundTruth truth;
};

// Deterministic for a given params.seed; documents are generated in parallel.
SynthCorpus synth_corpus(const SynthParams& params);

// Text renders as rows of glyph boxes one character high, non-text as solid
// fill; the rendered extent of every block equals its box.
GrayImage render_page(const PageAnnotation& page);

// Random sketch of the given type (1..6) on a 100x100 canvas: a guillotine
// tiling with 4-unit gutters, minus one tile for types 4..6.
QueryLayout random_query(std::mt19937_64& rng, int type, int max_depth = 3);

// `per_type` random queries of each type 1..6, named "t<type>_<i>".
std::vector<NamedLayout> standard_battery(std::uint64_t seed, std::size_t per_type);

CorpusStore build_store(const std::vector<PageAnnotation>& pages, IndexOptions options = {});

enum class Relevance : std::uint8_t {
  PlantedAndOracle,  // plantings plus brute-force matches
  PlantedOnly,
};

struct EvalOptions {
  Relevance relevance = Relevance::PlantedAndOracle;
  // Store whose brute-force matches define relevance; null means the store
  // under evaluation. Documents are matched by doc_id.
  const CorpusStore* oracle = nullptr;
  std::size_t timing_runs = 10;
  RetrieveOptions retrieve;
};

struct TypeRow {
  int type = 0;
  std::size_t queries = 0;
  std::size_t retrieved = 0;  // documents returned, summed over queries
  std::size_t relevant = 0;
  std::size_t hits = 0;       // retrieved and relevant
  double recall = 100;
  double precision = 100;
  double time_s = 0;          // mean over queries of the median wall-clock time
};

struct EvalReport {
  std::vector<TypeRow> rows;  // types present in the battery, ascending
  TypeRow total;
};

EvalReport evaluate(const CorpusStore& store, const GroundTruth& truth, const std::vector<NamedLayout>& battery,
                    const EvalOptions& opts = {});

struct AblationReport {
  EvalReport h1_only;
  EvalReport all;
};

// Indexes the corpus twice (H1 only, all four hypotheses) and evaluates the
// battery in both. Relevance is fixed across the two runs: plantings plus the
// brute-force matches over all four hypotheses, or plantings alone.
AblationReport ablate_hypotheses(const std::vector<PageAnnotation>& pages, const GroundTruth& truth,
                                 const std::vector<NamedLayout>& battery, std::size_t timing_runs = 1,
                                 Relevance relevance = Relevance::PlantedAndOracle);

double median(std::vector<double> v);

}  // namespace layoutsearch
