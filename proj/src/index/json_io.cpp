#include "layoutsearch/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "layoutsearch/error.hpp"

namespace layoutsearch {

namespace {

constexpr const char* kDirNames[4] = {"top", "bottom", "left", "right"};

double num(const Json& j, const char* field) {
  if (!j.contains(field) || !j.at(field).is_number()) {
    throw InvalidInput(std::string("missing numeric field '") + field + "'");
  }
  const double v = j.at(field).get<double>();
  if (!std::isfinite(v)) throw InvalidInput(std::string("non-finite field '") + field + "'");
  return v;
}

Rect rect_from(const Json& j) { return {num(j, "x"), num(j, "y"), num(j, "w"), num(j, "h")}; }

PageDims page_from(const Json& j) {
  if (!j.contains("page")) throw InvalidInput("missing 'page'");
  PageDims p{num(j.at("page"), "w"), num(j.at("page"), "h")};
  if (p.w <= 0 || p.h <= 0) throw InvalidInput("page dimensions must be positive");
  return p;
}

Kind kind_from(const Json& j) {
  if (!j.contains("kind") || !j.at("kind").is_string()) throw InvalidInput("missing 'kind'");
  auto k = parse_kind(j.at("kind").get<std::string>());
  if (!k) throw InvalidInput("unknown kind '" + j.at("kind").get<std::string>() + "'");
  return *k;
}

LayoutGraph graph_from_json(const Json& j, const std::string& doc_id, const PageDims& page, double ach) {
  LayoutGraph g;
  g.doc_id = doc_id;
  g.page = page;
  g.avg_char_height_doc = ach;
  auto h = parse_hypothesis(j.at("id").get<std::string>());
  if (!h) throw InvalidInput("unknown hypothesis id");
  g.hypothesis = *h;

  const auto& blocks = j.at("blocks");
  const std::size_t n = blocks.size();
  g.neighbors.resize(n);
  g.overlaps.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& jb = blocks[i];
    Block b;
    b.id = jb.at("id").get<BlockId>();
    if (b.id != i) throw InvalidInput("block ids must be dense and ordered");
    b.bbox = rect_from(jb);
    b.kind = kind_from(jb);
    b.avg_char_height_block = num(jb, "ach_block");
    b.location = spatial_location(b.bbox, page);
    g.blocks.push_back(b);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::string key = std::to_string(i);
    const auto& nb = j.at("neighbors").at(key);
    for (std::size_t d = 0; d < 4; ++d) {
      for (const auto& id : nb.at(kDirNames[d])) {
        const auto v = id.get<BlockId>();
        if (v >= n) throw InvalidInput("neighbor id out of range");
        g.neighbors[i][d].push_back(v);
      }
    }
    const auto& ov = j.at("overlaps").at(key);
    if (!ov.is_array() || ov.size() != 4) throw InvalidInput("overlaps must hold 4 booleans");
    for (std::size_t d = 0; d < 4; ++d) g.overlaps[i][d] = ov[d].get<bool>();
  }
  return g;
}

}  // namespace

Json number_json(double v) {
  if (std::isfinite(v) && v == std::trunc(v) && std::abs(v) < 9.0e15) {
    return Json(static_cast<std::int64_t>(v));
  }
  return Json(v);
}

Json rect_json(const Rect& r) {
  Json j = Json::object();
  j["x"] = number_json(r.x);
  j["y"] = number_json(r.y);
  j["w"] = number_json(r.w);
  j["h"] = number_json(r.h);
  return j;
}

Json graph_to_json(const LayoutGraph& graph) {
  Json j = Json::object();
  j["id"] = std::string(to_string(graph.hypothesis));
  Json blocks = Json::array();
  for (const auto& b : graph.blocks) {
    Json jb = Json::object();
    jb["id"] = b.id;
    const Json box = rect_json(b.bbox);
    for (auto& [k, v] : box.items()) jb[k] = v;
    jb["kind"] = std::string(to_string(b.kind));
    jb["ach_block"] = number_json(b.avg_char_height_block);
    blocks.push_back(std::move(jb));
  }
  j["blocks"] = std::move(blocks);
  Json neighbors = Json::object();
  Json overlaps = Json::object();
  for (const auto& b : graph.blocks) {
    Json nb = Json::object();
    for (std::size_t d = 0; d < 4; ++d) nb[kDirNames[d]] = graph.neighbors[b.id][d];
    neighbors[std::to_string(b.id)] = std::move(nb);
    Json ov = Json::array();
    for (bool f : graph.overlaps[b.id]) ov.push_back(f);
    overlaps[std::to_string(b.id)] = std::move(ov);
  }
  j["neighbors"] = std::move(neighbors);
  j["overlaps"] = std::move(overlaps);
  return j;
}

Json document_to_json(const Document& doc) {
  Json j = Json::object();
  j["doc_id"] = doc.doc_id;
  j["page"] = {{"w", number_json(doc.page.w)}, {"h", number_json(doc.page.h)}};
  j["ach_doc"] = number_json(doc.avg_char_height_doc);
  if (!doc.source.empty()) j["source"] = doc.source;
  Json hyps = Json::array();
  for (const auto& g : doc.graphs) hyps.push_back(graph_to_json(g));
  j["hypotheses"] = std::move(hyps);
  return j;
}

Document document_from_json(const Json& j) {
  try {
    Document doc;
    doc.doc_id = j.at("doc_id").get<std::string>();
    doc.page = page_from(j);
    doc.avg_char_height_doc = j.contains("ach_doc") ? num(j, "ach_doc") : 0.0;
    if (j.contains("source")) doc.source = j.at("source").get<std::string>();
    const auto& hyps = j.at("hypotheses");
    if (!hyps.is_array() || hyps.size() != 4) throw InvalidInput("expected 4 hypotheses");
    std::array<bool, 4> seen{};
    for (const auto& jh : hyps) {
      LayoutGraph g = graph_from_json(jh, doc.doc_id, doc.page, doc.avg_char_height_doc);
      const auto slot = static_cast<std::size_t>(g.hypothesis);
      if (seen[slot]) throw InvalidInput("duplicate hypothesis");
      seen[slot] = true;
      doc.graphs[slot] = std::move(g);
    }
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(e.what());
  }
}

Json annotation_to_json(const PageAnnotation& page) {
  Json j = Json::object();
  j["doc_id"] = page.doc_id;
  j["page"] = {{"w", number_json(page.page.w)}, {"h", number_json(page.page.h)}};
  if (page.avg_char_height_doc) j["ach_doc"] = number_json(*page.avg_char_height_doc);
  Json blocks = Json::array();
  for (const auto& b : page.blocks) {
    Json jb = rect_json(b.bbox);
    jb["kind"] = std::string(to_string(b.kind));
    jb["ach_block"] = number_json(b.avg_char_height_block);
    blocks.push_back(std::move(jb));
  }
  j["blocks"] = std::move(blocks);
  Json lines = Json::array();
  for (const auto& l : page.lines) {
    lines.push_back({{"y", number_json(l.y)}, {"x0", number_json(l.x0)}, {"x1", number_json(l.x1)}});
  }
  j["lines"] = std::move(lines);
  return j;
}

PageAnnotation annotation_from_json(const Json& j) {
  try {
    if (!j.is_object()) throw InvalidInput("annotation must be a JSON object");
    PageAnnotation page;
    if (j.contains("doc_id")) page.doc_id = j.at("doc_id").get<std::string>();
    page.page = page_from(j);
    if (j.contains("ach_doc") && !j.at("ach_doc").is_null()) {
      page.avg_char_height_doc = num(j, "ach_doc");
      if (*page.avg_char_height_doc <= 0) throw InvalidInput("ach_doc must be positive");
    }
    if (!j.contains("blocks") || !j.at("blocks").is_array()) throw InvalidInput("missing 'blocks'");
    for (const auto& jb : j.at("blocks")) {
      RawBlock b;
      b.bbox = rect_from(jb);
      b.kind = kind_from(jb);
      b.avg_char_height_block = jb.contains("ach_block") ? num(jb, "ach_block") : 0.0;
      if (b.bbox.empty()) throw InvalidInput("block area must be positive");
      if (b.kind == Kind::Text && b.avg_char_height_block <= 0) {
        // Annotations may omit per-block character height; fall back to the page value.
        if (!page.avg_char_height_doc) throw InvalidInput("text block without ach_block or ach_doc");
        b.avg_char_height_block = *page.avg_char_height_doc;
      }
      page.blocks.push_back(b);
    }
    if (j.contains("lines")) {
      for (const auto& jl : j.at("lines")) page.lines.push_back({num(jl, "y"), num(jl, "x0"), num(jl, "x1")});
    }
    if (!page.avg_char_height_doc) {
      const double ach = derive_avg_char_height(page.blocks);
      if (ach <= 0) throw NoTextContent();
      page.avg_char_height_doc = ach;
    }
    return page;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(e.what());
  }
}

std::string dump(const Json& j, int indent) { return j.dump(indent); }

void save(const CorpusStore& store, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& doc : store.documents()) out << document_to_json(doc).dump() << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

CorpusStore load_from_string(const std::string& text, IndexOptions options) {
  CorpusStore store(options);
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      store.insert_document(document_from_json(Json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw CorpusFormatError(lineno, e.what());
    } catch (const Error& e) {
      throw CorpusFormatError(lineno, e.what());
    }
  }
  return store;
}

CorpusStore load(const std::filesystem::path& path, IndexOptions options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_from_string(buf.str(), options);
}

}  // namespace layoutsearch
