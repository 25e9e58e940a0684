// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [name...]     run only the named criteria
//
// Exit status is non-zero when a criterion fails, except for the criteria in
// kKnownRed, which are reported as FAIL but do not fail the run. See the
// "Known failures" section of the README for the analysis behind each entry.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "layoutsearch/eval.hpp"
#include "layoutsearch/json_io.hpp"
#include "layoutsearch/raster.hpp"
#include "layoutsearch/service.hpp"

#include "support.hpp"

using namespace layoutsearch;
using namespace layoutsearch::testing;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned tolerances.
constexpr std::size_t kOracleCorpora = 200;
constexpr std::size_t kOracleMinDocs = 100;
constexpr std::size_t kOracleMaxDocs = 500;
constexpr std::size_t kOracleQueriesPerType = 10;
constexpr double kOracleBudgetS = 600;
constexpr std::size_t kPlantingsPerType = 100;
constexpr std::size_t kGridMaxCandidates = 5;
constexpr double kMaxCandidateFraction = 0.20;
constexpr std::size_t kLatencyDocs = 5000;
constexpr std::size_t kLatencyRuns = 10;
constexpr double kLatencyLimitS = 1.0;
constexpr double kAblationMaxPrecisionDelta = 2.0;
constexpr std::size_t kOtsuHistograms = 100;
constexpr std::size_t kRankTrials = 100;
constexpr std::size_t kRankDistractors = 5;
constexpr std::size_t kPersistenceQueries = 20;

const std::set<std::string> kKnownRed = {"pruning"};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

using MatchKey = std::tuple<std::uint32_t, Hypothesis, std::vector<BlockId>, std::vector<std::vector<BlockId>>>;

std::set<MatchKey> as_set(const std::vector<MatchResult>& rs) {
  std::set<MatchKey> s;
  for (const auto& m : rs) s.insert({m.doc, m.hypothesis, m.block_map, m.dummy_map});
  return s;
}

std::size_t total_entries(const CorpusStore& store) { return store.index().size(); }

// ---------------------------------------------------------------------------

Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  std::size_t queries = 0, discrepancies = 0, matches = 0;
  for (std::size_t c = 0; c < kOracleCorpora; ++c) {
    auto battery = standard_battery(5000 + c, kOracleQueriesPerType);
    SynthParams p;
    p.seed = 1 + c;
    p.docs = std::uniform_int_distribution<std::size_t>(kOracleMinDocs, kOracleMaxDocs)(rng);
    p.plant = battery;
    p.plant_rate = 0.3;
    p.decoy_rate = 0.3;
    const CorpusStore store = build_store(synth_corpus(p).pages);
    for (const auto& nl : battery) {
      const auto hashed = retrieve(store, nl.layout);
      const auto brute = brute_force_retrieve(store, nl.layout);
      matches += brute.size();
      ++queries;
      if (as_set(hashed) != as_set(brute)) ++discrepancies;
    }
  }
  const double elapsed = seconds_since(t0);
  return {discrepancies == 0 && elapsed < kOracleBudgetS,
          fmt("%zu corpora, %zu queries, %zu oracle matches, %zu discrepancies, %.0f s (limit %.0f s)", kOracleCorpora,
              queries, matches, discrepancies, elapsed, kOracleBudgetS)};
}

Outcome planted_recall() {
  // 10 queries per type, each planted in 10 documents.
  const std::size_t per_type = 10;
  auto battery = standard_battery(777, per_type);
  SynthParams p;
  p.seed = 4242;
  p.docs = 6 * kPlantingsPerType;
  p.plant = battery;
  p.plant_rate = 1;
  const SynthCorpus corpus = synth_corpus(p);
  const CorpusStore store = build_store(corpus.pages);

  std::map<std::string, const NamedLayout*> by_name;
  std::map<std::string, std::vector<MatchResult>> results;
  for (const auto& nl : battery) {
    by_name[nl.name] = &nl;
    results[nl.name] = retrieve(store, nl.layout);
  }
  std::map<int, std::pair<std::size_t, std::size_t>> per_type_counts;  // found, planted
  for (const auto& pl : corpus.truth.plantings) {
    const int type = by_name.at(pl.layout)->layout.type;
    auto& [found, planted] = per_type_counts[type];
    ++planted;
    for (const auto& m : results[pl.layout]) {
      const Document& d = store.documents()[m.doc];
      if (d.doc_id != pl.doc_id) continue;
      const LayoutGraph& g = d.graph(m.hypothesis);
      bool same = true;
      for (std::size_t i = 0; i < m.block_map.size(); ++i) same = same && g.blocks[m.block_map[i]].bbox == pl.blocks[i];
      if (same) {
        ++found;
        break;
      }
    }
  }
  bool pass = per_type_counts.size() == 6;
  std::string detail;
  for (const auto& [type, fp] : per_type_counts) {
    pass = pass && fp.first == fp.second && fp.second >= kPlantingsPerType;
    detail += fmt("type %d %zu/%zu  ", type, fp.first, fp.second);
  }
  return {pass, detail + "(scales 0.5-2x per axis, random translation)"};
}

Outcome pruning() {
  // The constructed page is indexed as a single graph, as in the figure.
  IndexOptions h1;
  h1.hypotheses = {true, false, false, false};
  const CorpusStore grid = build_store({grid_page()}, h1);
  const QueryLayout q = make_layout({100, 100}, [] {
    std::vector<QueryBlock> bs;
    for (const auto& s : grid_sketch()) bs.push_back({s.r, s.kind});
    return bs;
  }());
  const std::size_t blocks = grid.documents()[0].graph(Hypothesis::H1).size();
  const std::size_t cands = query_candidates(grid, q).size();
  const std::size_t found = retrieve(grid, q).size();
  const bool grid_ok = blocks == 53 && cands <= kGridMaxCandidates && found == brute_force_retrieve(grid, q).size();

  std::vector<double> fractions;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    SynthParams p;
    p.seed = 900 + s;
    p.docs = 200;
    const CorpusStore store = build_store(synth_corpus(p).pages);
    for (const auto& nl : standard_battery(100 + s, 10)) {
      fractions.push_back(static_cast<double>(query_candidates(store, nl.layout).size()) /
                          static_cast<double>(total_entries(store)));
    }
  }
  const double med = median(fractions);
  return {grid_ok && med <= kMaxCandidateFraction,
          fmt("grid page: %zu blocks, %zu candidates (limit %zu), %zu matches; random corpora: median candidate "
              "fraction %.3f over %zu queries (limit %.2f)",
              blocks, cands, kGridMaxCandidates, found, med, fractions.size(), kMaxCandidateFraction)};
}

Outcome latency() {
  auto battery = standard_battery(31, 2);
  SynthParams p;
  p.seed = 5000;
  p.docs = kLatencyDocs;
  p.plant = battery;
  p.plant_rate = 0.2;
  const auto tb = Clock::now();
  const CorpusStore store = build_store(synth_corpus(p).pages);
  const double build_s = seconds_since(tb);

  std::vector<double> medians;
  std::size_t results = 0;
  for (const auto& nl : battery) {
    std::vector<double> runs;
    for (std::size_t r = 0; r < kLatencyRuns; ++r) {
      const auto t0 = Clock::now();
      results += retrieve(store, nl.layout).size();
      runs.push_back(seconds_since(t0));
    }
    medians.push_back(median(runs));
  }
  const double worst = *std::max_element(medians.begin(), medians.end());
  return {worst < kLatencyLimitS,
          fmt("%zu docs, %zu index entries (generated and indexed in %.1f s); %zu queries x %zu runs: median %.3f s, worst per-query "
              "median %.3f s (limit %.1f s)",
              store.documents().size(), store.index().size(), build_s, battery.size(), kLatencyRuns, median(medians),
              worst, kLatencyLimitS)};
}

Outcome ablation() {
  auto battery = standard_battery(404, 10);
  SynthParams p;
  p.seed = 77;
  p.docs = 300;
  p.plant = battery;
  p.plant_rate = 1;
  p.decoy_rate = 1;
  p.background_decoys = 2;
  const SynthCorpus corpus = synth_corpus(p);
  const AblationReport r = ablate_hypotheses(corpus.pages, corpus.truth, battery);
  const double dp = r.all.total.precision - r.h1_only.total.precision;
  // Informational: relevance from plantings alone counts every unplanted true
  // match as a false positive.
  const AblationReport po = ablate_hypotheses(corpus.pages, corpus.truth, battery, 1, Relevance::PlantedOnly);
  return {r.h1_only.total.recall < r.all.total.recall && std::abs(dp) <= kAblationMaxPrecisionDelta,
          fmt("H1 only: recall %.2f precision %.2f; all hypotheses: recall %.2f precision %.2f; |dP| %.2f (limit %.1f); "
              "planted-only relevance: recall %.2f vs %.2f, precision %.2f vs %.2f",
              r.h1_only.total.recall, r.h1_only.total.precision, r.all.total.recall, r.all.total.precision, std::abs(dp),
              kAblationMaxPrecisionDelta, po.h1_only.total.recall, po.all.total.recall, po.h1_only.total.precision,
              po.all.total.precision)};
}

Outcome boolean() {
  const CorpusStore store = build_store(boolean_pages());
  const BooleanQuery q = parse_query(boolean_query());
  const auto hits = evaluate_boolean(store, q);
  std::string ids;
  for (const auto& h : hits) ids += (ids.empty() ? "" : ",") + h.doc_id;
  // Each atom on its own, so the exclusions are for the stated reasons.
  auto docs_of = [&](const std::string& text) {
    std::set<std::string> s;
    for (const auto& h : evaluate_boolean(store, parse_query(text))) s.insert(h.doc_id);
    return s;
  };
  const auto a = docs_of(query_text({100, 100}, {{"A", boolean_a()}}, "A"));
  const auto a_bottom = docs_of(query_text({100, 100}, {{"A", boolean_a()}}, "(A,bottom)"));
  const auto b = docs_of(query_text({100, 100}, {{"B", boolean_b()}}, "B"));
  const auto c = docs_of(query_text({100, 100}, {{"C", boolean_c()}}, "C"));
  const bool reasons = a == std::set<std::string>{"doc1", "doc2", "doc3"} && a_bottom == std::set<std::string>{"doc1", "doc3"} &&
                       b.size() == 3 && c == std::set<std::string>{"doc3"};
  return {hits.size() == 1 && hits[0].doc_id == "doc1" && reasons,
          "(A,bottom) AND (B) AND (NOT C) -> [" + ids + "]; A in " + std::to_string(a.size()) + " docs, (A,bottom) in " +
              std::to_string(a_bottom.size()) + ", C in " + std::to_string(c.size())};
}

// Exhaustive scan with exact integer arithmetic, written independently of the
// library: sigma_B^2 * N^2 = (s0*n1 - s1*n0)^2 / (n0*n1).
int otsu_oracle(const Histogram& h) {
  using u128 = unsigned __int128;
  std::int64_t n = 0, s = 0;
  for (int i = 0; i < 256; ++i) {
    n += static_cast<std::int64_t>(h[i]);
    s += static_cast<std::int64_t>(h[i]) * i;
  }
  int best = -1;
  u128 bnum = 0, bden = 1;
  for (int t = 0; t < 256; ++t) {
    std::int64_t n0 = 0, s0 = 0;
    for (int i = 0; i <= t; ++i) {
      n0 += static_cast<std::int64_t>(h[i]);
      s0 += static_cast<std::int64_t>(h[i]) * i;
    }
    const std::int64_t n1 = n - n0, s1 = s - s0;
    if (n0 == 0 || n1 == 0) continue;
    const __int128 d = static_cast<__int128>(s0) * n1 - static_cast<__int128>(s1) * n0;
    const u128 num = static_cast<u128>(d < 0 ? -d : d) * static_cast<u128>(d < 0 ? -d : d);
    const u128 den = static_cast<u128>(n0) * static_cast<u128>(n1);
    if (best < 0 || num * bden > bnum * den) {
      best = t;
      bnum = num;
      bden = den;
    }
  }
  return best;
}

Outcome otsu() {
  std::mt19937_64 rng(123);
  std::size_t exact = 0, ties = 0;
  for (std::size_t k = 0; k < kOtsuHistograms; ++k) {
    Histogram h{};
    const int pixels = 64 * 64;
    if (k % 4 == 3) {
      // Two levels: every threshold between them is optimal.
      const int lo = std::uniform_int_distribution<int>(0, 120)(rng);
      const int hi = std::uniform_int_distribution<int>(lo + 2, 255)(rng);
      h[lo] = pixels / 2;
      h[hi] = pixels - pixels / 2;
    } else if (k % 4 == 2) {
      // A few populated levels.
      for (int i = 0; i < pixels; ++i) ++h[static_cast<std::size_t>(std::uniform_int_distribution<int>(0, 4)(rng) * 50)];
    } else {
      std::normal_distribution<double> dark(std::uniform_real_distribution<double>(20, 110)(rng), 15);
      std::normal_distribution<double> light(std::uniform_real_distribution<double>(140, 240)(rng), 20);
      const double ink = std::uniform_real_distribution<double>(0.05, 0.5)(rng);
      for (int i = 0; i < pixels; ++i) {
        const double v = std::uniform_real_distribution<double>(0, 1)(rng) < ink ? dark(rng) : light(rng);
        ++h[static_cast<std::size_t>(std::clamp(std::lround(v), 0L, 255L))];
      }
    }
    const int want = otsu_oracle(h);
    const OtsuThreshold got = otsu_threshold(h);
    if (!got.degenerate && got.threshold == want) ++exact;
    if (k % 4 >= 2) ++ties;
  }
  return {exact == kOtsuHistograms,
          fmt("%zu/%zu exact (%zu with tied or sparse optima)", exact, kOtsuHistograms, ties)};
}

Outcome ranking() {
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> u(0, 1);
  std::size_t first = 0, strict = 0, complete = 0;
  for (std::size_t trial = 0; trial < kRankTrials; ++trial) {
    const int type = 1 + static_cast<int>(trial % 6);
    const QueryLayout q = random_query(rng, type);
    const std::size_t n = kRankDistractors + 1;
    const std::size_t exact_slot = trial % n;
    std::vector<PageAnnotation> pages;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = 4 + 6 * u(rng);
      double sx = s, sy = s;
      if (i != exact_slot) {
        // Stretch one axis by 1.3x-2x so every block's aspect ratio moves.
        const double f = 1.3 + 0.7 * u(rng);
        (u(rng) < 0.5 ? sx : sy) *= f;
      }
      const double tx = 40 + (2300 - 100 * sx) * u(rng);
      const double ty = 40 + (3100 - 100 * sy) * u(rng);
      pages.push_back(instance_page("d" + std::to_string(i), q, sx, sy, tx, ty));
    }
    const CorpusStore store = build_store(pages);
    const auto rs = retrieve(store, q);
    std::map<std::string, double> best;
    for (const auto& m : rs) {
      auto [it, fresh] = best.emplace(m.doc_id, m.score);
      if (!fresh) it->second = std::min(it->second, m.score);
    }
    if (best.size() == n) ++complete;
    const std::string exact_id = "d" + std::to_string(exact_slot);
    if (!rs.empty() && rs.front().doc_id == exact_id) ++first;
    bool lower = best.count(exact_id) != 0;
    for (const auto& [id, sc] : best) {
      if (id != exact_id) lower = lower && best[exact_id] < sc;
    }
    if (lower) ++strict;
  }
  return {first == kRankTrials && strict == kRankTrials && complete == kRankTrials,
          fmt("%zu trials x %zu distractors: exact first in %zu, strictly lowest score in %zu, all instances "
              "retrieved in %zu",
              kRankTrials, kRankDistractors, first, strict, complete)};
}

Outcome persistence() {
  auto battery = standard_battery(99, 4);
  battery.resize(kPersistenceQueries);
  SynthParams p;
  p.seed = 321;
  p.docs = 150;
  p.plant = battery;
  p.plant_rate = 1;
  p.decoy_rate = 0.5;
  const CorpusStore before = build_store(synth_corpus(p).pages);
  const auto path = std::filesystem::temp_directory_path() / "layoutsearch_acceptance_corpus.jsonl";
  save(before, path);
  const CorpusStore after = load(path);
  std::filesystem::remove(path);

  std::size_t identical = 0, results = 0;
  for (const auto& nl : battery) {
    const std::string text = dump(layout_query_json(nl.name, nl.layout));
    const std::string a = dump(run_query(before, text, 0));
    const std::string b = dump(run_query(after, text, 0));
    identical += a == b;
    results += run_query(after, text, 0).at("results").size();
  }
  return {identical == kPersistenceQueries,
          fmt("%zu/%zu responses byte-identical after save/load (%zu documents returned in total)", identical,
              kPersistenceQueries, results)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"oracle_equivalence", oracle_equivalence},
      {"planted_recall", planted_recall},
      {"pruning", pruning},
      {"latency", latency},
      {"ablation", ablation},
      {"boolean", boolean},
      {"otsu", otsu},
      {"ranking", ranking},
      {"persistence", persistence},
  };
  std::set<std::string> only(argv + 1, argv + argc);
  int unexpected = 0;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && !only.count(name)) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool known = kKnownRed.count(name) != 0;
    std::printf("%s %-18s %s [%.1f s]%s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), seconds_since(t0),
                !o.pass && known ? " (known failure)" : "");
    std::fflush(stdout);
    if (!o.pass && !known) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
