#include "layoutsearch/error.hpp"
#include "layoutsearch/json_io.hpp"

namespace layoutsearch {

namespace {

Rect rect_of(const Json& j) {
  return {j.at("x").get<double>(), j.at("y").get<double>(), j.at("w").get<double>(), j.at("h").get<double>()};
}

Json row_json(const TypeRow& r) {
  Json j = Json::object();
  if (r.type) j["type"] = r.type;
  j["queries"] = r.queries;
  j["documents"] = r.retrieved;
  j["relevant"] = r.relevant;
  j["hits"] = r.hits;
  j["recall"] = r.recall;
  j["precision"] = r.precision;
  j["time_s"] = r.time_s;
  return j;
}

}  // namespace

Json layout_query_json(const std::string& name, const QueryLayout& layout) {
  Json blocks = Json::array();
  for (const auto& b : layout.blocks) {
    Json jb = rect_json(b.bbox);
    jb["kind"] = std::string(to_string(b.kind));
    blocks.push_back(std::move(jb));
  }
  Json j = Json::object();
  j["canvas"] = {{"w", number_json(layout.canvas.w)}, {"h", number_json(layout.canvas.h)}};
  j["layouts"] = Json::object();
  j["layouts"][name] = {{"blocks", std::move(blocks)}};
  j["expr"] = name;
  return j;
}

Json truth_to_json(const GroundTruth& truth) {
  Json list = Json::array();
  for (const auto& p : truth.plantings) {
    Json j = Json::object();
    j["doc_id"] = p.doc_id;
    j["layout"] = p.layout;
    j["transform"] = {{"sx", p.sx}, {"sy", p.sy}, {"tx", p.tx}, {"ty", p.ty}};
    Json blocks = Json::array();
    for (const auto& r : p.blocks) blocks.push_back(rect_json(r));
    j["blocks"] = std::move(blocks);
    Json fills = Json::array();
    for (const auto& f : p.fills) {
      Json one = Json::array();
      for (const auto& r : f) one.push_back(rect_json(r));
      fills.push_back(std::move(one));
    }
    j["fills"] = std::move(fills);
    Json decoys = Json::array();
    for (auto d : p.decoys) decoys.push_back(std::string(to_string(d)));
    j["decoys"] = std::move(decoys);
    list.push_back(std::move(j));
  }
  return Json{{"plantings", std::move(list)}};
}

GroundTruth truth_from_json(const Json& j) {
  GroundTruth out;
  try {
    for (const auto& jp : j.at("plantings")) {
      Planting p;
      p.doc_id = jp.at("doc_id").get<std::string>();
      p.layout = jp.at("layout").get<std::string>();
      const auto& t = jp.at("transform");
      p.sx = t.at("sx").get<double>();
      p.sy = t.at("sy").get<double>();
      p.tx = t.at("tx").get<double>();
      p.ty = t.at("ty").get<double>();
      for (const auto& r : jp.at("blocks")) p.blocks.push_back(rect_of(r));
      if (jp.contains("fills")) {
        for (const auto& f : jp.at("fills")) {
          std::vector<Rect> one;
          for (const auto& r : f) one.push_back(rect_of(r));
          p.fills.push_back(std::move(one));
        }
      }
      if (jp.contains("decoys")) {
        for (const auto& d : jp.at("decoys")) {
          const auto s = d.get<std::string>();
          if (s == "small_block") p.decoys.push_back(DecoyKind::SmallBlock);
          else if (s == "caption") p.decoys.push_back(DecoyKind::Caption);
          else if (s == "split_nontext") p.decoys.push_back(DecoyKind::SplitNonText);
          else throw InvalidInput("unknown decoy kind '" + s + "'");
        }
      }
      out.plantings.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("bad ground truth: ") + e.what());
  }
  return out;
}

Json report_json(const EvalReport& report) {
  Json rows = Json::array();
  for (const auto& r : report.rows) rows.push_back(row_json(r));
  return Json{{"rows", std::move(rows)}, {"total", row_json(report.total)}};
}

}  // namespace layoutsearch
