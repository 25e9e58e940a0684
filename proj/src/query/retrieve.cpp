#include <algorithm>
#include <map>
#include <tuple>

#include "layoutsearch/query.hpp"

namespace layoutsearch {

namespace {

using DedupKey = std::pair<std::uint32_t, std::vector<std::vector<Rect>>>;

DedupKey dedup_key(const MatchResult& m, const LayoutGraph& g) {
  DedupKey key{m.doc, {}};
  for (BlockId b : m.block_map) key.second.push_back({g.blocks[b].bbox});
  for (const auto& v : m.dummy_map) {
    std::vector<Rect> rs;
    for (BlockId b : v) rs.push_back(g.blocks[b].bbox);
    std::sort(rs.begin(), rs.end());
    key.second.push_back(std::move(rs));
  }
  return key;
}

bool result_less(const MatchResult& a, const MatchResult& b) {
  return std::tie(a.score, a.doc_id, a.match_bbox.y, a.match_bbox.x, a.hypothesis, a.block_map, a.dummy_map) <
         std::tie(b.score, b.doc_id, b.match_bbox.y, b.match_bbox.x, b.hypothesis, b.block_map, b.dummy_map);
}

// Matches found for candidates in candidate order, de-duplicated across
// hypotheses by mapped page boxes (keeping the lowest score, then hypothesis)
// and ranked.
std::vector<MatchResult> finalize(const CorpusStore& store, std::vector<std::optional<MatchResult>>& found) {
  std::map<DedupKey, MatchResult> best;
  for (auto& f : found) {
    if (!f) continue;
    const LayoutGraph& g = store.documents()[f->doc].graph(f->hypothesis);
    auto key = dedup_key(*f, g);
    auto it = best.find(key);
    if (it == best.end()) {
      best.emplace(std::move(key), std::move(*f));
    } else if (std::tie(f->score, f->hypothesis) < std::tie(it->second.score, it->second.hypothesis)) {
      it->second = std::move(*f);
    }
  }
  std::vector<MatchResult> out;
  out.reserve(best.size());
  for (auto& [k, v] : best) out.push_back(std::move(v));
  std::sort(out.begin(), out.end(), result_less);
  return out;
}

std::optional<MatchResult> try_candidate(const CorpusStore& store, const QueryLayout& layout, const Candidate& c) {
  const LayoutGraph& g = store.documents()[c.doc].graph(c.hypothesis);
  auto m = match_sublayout(layout, g, c.block);
  if (m) m->doc = c.doc;
  return m;
}

std::vector<Candidate> all_blocks(const CorpusStore& store) {
  std::vector<Candidate> out;
  const auto& docs = store.documents();
  for (std::uint32_t d = 0; d < docs.size(); ++d) {
    for (Hypothesis h : kHypotheses) {
      if (!store.indexes(h)) continue;
      for (const auto& b : docs[d].graph(h).blocks) out.push_back({d, h, b.id});
    }
  }
  return out;
}

std::vector<MatchResult> run_serial(const CorpusStore& store, const QueryLayout& layout,
                                    const std::vector<Candidate>& cands) {
  std::vector<std::optional<MatchResult>> found(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) found[i] = try_candidate(store, layout, cands[i]);
  return finalize(store, found);
}

std::vector<MatchResult> run_parallel(const CorpusStore& store, const QueryLayout& layout,
                                      const std::vector<Candidate>& cands) {
  std::vector<std::optional<MatchResult>> found(cands.size());
  const auto n = static_cast<std::ptrdiff_t>(cands.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    found[static_cast<std::size_t>(i)] = try_candidate(store, layout, cands[static_cast<std::size_t>(i)]);
  }
  return finalize(store, found);
}

}  // namespace

std::vector<Candidate> query_candidates(const CorpusStore& store, const QueryLayout& layout) {
  return store.candidate_lookup(reference_descriptor(layout));
}

std::vector<MatchResult> retrieve(const CorpusStore& store, const QueryLayout& layout, RetrieveOptions opts) {
  const auto cands = opts.use_hash ? query_candidates(store, layout) : all_blocks(store);
  return opts.parallel ? run_parallel(store, layout, cands) : run_serial(store, layout, cands);
}

std::vector<MatchResult> retrieve_serial(const CorpusStore& store, const QueryLayout& layout) {
  return run_serial(store, layout, query_candidates(store, layout));
}

std::vector<MatchResult> brute_force_retrieve(const CorpusStore& store, const QueryLayout& layout) {
  return run_serial(store, layout, all_blocks(store));
}

bool region_predicate(const Rect& match_bbox, const PageDims& page, std::optional<Location> region) {
  return !region || spatial_location(match_bbox, page) == *region;
}

}  // namespace layoutsearch
