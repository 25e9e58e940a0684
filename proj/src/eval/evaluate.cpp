#include <algorithm>
#include <chrono>
#include <map>
#include <set>

#include "layoutsearch/eval.hpp"

namespace layoutsearch {

double median(std::vector<double> v) {
  if (v.empty()) return 0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  if (v.size() % 2) return v[mid];
  const double hi = v[mid];
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return (lo + hi) / 2;
}

CorpusStore build_store(const std::vector<PageAnnotation>& pages, IndexOptions options) {
  std::vector<Document> docs(pages.size());
  const auto n = static_cast<std::ptrdiff_t>(pages.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    docs[static_cast<std::size_t>(i)] = make_document(pages[static_cast<std::size_t>(i)]);
  }
  CorpusStore store(options);
  for (auto& d : docs) store.insert_document(std::move(d));
  return store;
}

namespace {

void finish_row(TypeRow& r) {
  r.recall = r.relevant ? 100.0 * static_cast<double>(r.hits) / static_cast<double>(r.relevant) : 100.0;
  r.precision = r.retrieved ? 100.0 * static_cast<double>(r.hits) / static_cast<double>(r.retrieved) : 100.0;
}

}  // namespace

EvalReport evaluate(const CorpusStore& store, const GroundTruth& truth, const std::vector<NamedLayout>& battery,
                    const EvalOptions& opts) {
  std::map<std::string, std::set<std::uint32_t>> planted;
  const auto& docs = store.documents();
  std::map<std::string, std::uint32_t> slot;
  for (std::uint32_t i = 0; i < docs.size(); ++i) slot[docs[i].doc_id] = i;
  for (const auto& p : truth.plantings) {
    if (auto it = slot.find(p.doc_id); it != slot.end()) planted[p.layout].insert(it->second);
  }

  std::map<int, TypeRow> rows;
  std::map<int, std::vector<double>> times;
  for (const auto& nl : battery) {
    std::vector<MatchResult> results;
    std::vector<double> runs;
    for (std::size_t r = 0; r < std::max<std::size_t>(1, opts.timing_runs); ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      results = retrieve(store, nl.layout, opts.retrieve);
      runs.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    std::set<std::uint32_t> retrieved;
    for (const auto& m : results) retrieved.insert(m.doc);
    std::set<std::uint32_t> relevant = planted[nl.name];
    if (opts.relevance == Relevance::PlantedAndOracle) {
      const CorpusStore& oracle = opts.oracle ? *opts.oracle : store;
      for (const auto& m : brute_force_retrieve(oracle, nl.layout)) {
        if (auto it = slot.find(m.doc_id); it != slot.end()) relevant.insert(it->second);
      }
    }

    TypeRow& row = rows[nl.layout.type];
    row.type = nl.layout.type;
    ++row.queries;
    row.retrieved += retrieved.size();
    row.relevant += relevant.size();
    for (auto d : retrieved) row.hits += relevant.count(d);
    times[row.type].push_back(median(runs));
  }

  EvalReport report;
  report.total.type = 0;
  std::vector<double> all_times;
  for (auto& [type, row] : rows) {
    const auto& ts = times[type];
    double sum = 0;
    for (double t : ts) sum += t;
    row.time_s = ts.empty() ? 0 : sum / static_cast<double>(ts.size());
    all_times.insert(all_times.end(), ts.begin(), ts.end());
    finish_row(row);
    report.total.queries += row.queries;
    report.total.retrieved += row.retrieved;
    report.total.relevant += row.relevant;
    report.total.hits += row.hits;
    report.rows.push_back(row);
  }
  double sum = 0;
  for (double t : all_times) sum += t;
  report.total.time_s = all_times.empty() ? 0 : sum / static_cast<double>(all_times.size());
  finish_row(report.total);
  return report;
}

AblationReport ablate_hypotheses(const std::vector<PageAnnotation>& pages, const GroundTruth& truth,
                                 const std::vector<NamedLayout>& battery, std::size_t timing_runs,
                                 Relevance relevance) {
  IndexOptions h1;
  h1.hypotheses = {true, false, false, false};
  const CorpusStore all = build_store(pages);
  EvalOptions opts;
  opts.relevance = relevance;
  opts.oracle = &all;
  opts.timing_runs = timing_runs;
  AblationReport out;
  out.h1_only = evaluate(build_store(pages, h1), truth, battery, opts);
  out.all = evaluate(all, truth, battery, opts);
  return out;
}

}  // namespace layoutsearch
