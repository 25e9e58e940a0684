#include "layoutsearch/json_io.hpp"

namespace layoutsearch {

namespace {

Json doc_block_json(const LayoutGraph& g, BlockId id) {
  const Block& b = g.blocks[id];
  Json j = Json::object();
  j["id"] = id;
  const Json box = rect_json(b.bbox);
  for (auto& [k, v] : box.items()) j[k] = v;
  j["kind"] = std::string(to_string(b.kind));
  return j;
}

Json match_json(const CorpusStore& store, const AtomMatch& am) {
  const MatchResult& m = am.match;
  const LayoutGraph& g = store.documents()[m.doc].graph(m.hypothesis);
  Json j = Json::object();
  j["layout"] = am.layout;
  j["hypothesis"] = std::string(to_string(m.hypothesis));
  j["score"] = m.score;
  j["bbox"] = rect_json(m.match_bbox);
  Json mapping = Json::array();
  for (std::size_t i = 0; i < m.block_map.size(); ++i) {
    mapping.push_back({{"query_block", i}, {"dummy", false}, {"doc_blocks", Json::array({doc_block_json(g, m.block_map[i])})}});
  }
  for (std::size_t k = 0; k < m.dummy_map.size(); ++k) {
    Json blocks = Json::array();
    for (BlockId b : m.dummy_map[k]) blocks.push_back(doc_block_json(g, b));
    mapping.push_back({{"query_block", m.block_map.size() + k}, {"dummy", true}, {"doc_blocks", std::move(blocks)}});
  }
  j["mapping"] = std::move(mapping);
  return j;
}

}  // namespace

Json results_json(const CorpusStore& store, const BooleanQuery& q, const std::vector<DocumentHit>& hits) {
  Json out = Json::object();
  Json types = Json::object();
  for (const auto& [name, layout] : q.layouts) types[name] = layout.type;
  out["query_types"] = std::move(types);
  Json results = Json::array();
  for (const auto& h : hits) {
    Json r = Json::object();
    r["doc_id"] = h.doc_id;
    r["score"] = h.score ? Json(*h.score) : Json(nullptr);
    Json matches = Json::array();
    for (const auto& am : h.matches) matches.push_back(match_json(store, am));
    r["matches"] = std::move(matches);
    results.push_back(std::move(r));
  }
  out["results"] = std::move(results);
  return out;
}

}  // namespace layoutsearch
