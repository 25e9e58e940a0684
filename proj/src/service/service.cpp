#include "layoutsearch/service.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "httplib.h"

#include "layoutsearch/error.hpp"
#include "layoutsearch/ingest.hpp"
#include "layoutsearch/query.hpp"

namespace layoutsearch {

namespace fs = std::filesystem;

namespace {

HttpResult json_result(int status, const Json& j) { return {status, dump(j), "application/json"}; }

HttpResult error_result(int status, const std::string& error, const std::string& reason) {
  return json_result(status, Json{{"error", error}, {"reason", reason}});
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InvalidInput("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes next to the target and renames, so a crash never leaves a torn file.
void write_atomically(const fs::path& target, const std::string& bytes) {
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << bytes;
  }
  fs::rename(tmp, target);
}

bool looks_like_pgm(const std::string& body) { return body.size() >= 2 && body[0] == 'P' && (body[1] == '5' || body[1] == '2'); }

bool looks_like_png(const std::string& body) { return body.rfind("\x89PNG", 0) == 0; }

bool safe_id(const std::string& id) {
  if (id.empty() || id == "." || id == "..") return false;
  return id.find_first_of("/\\") == std::string::npos;
}

}  // namespace

void ServiceConfig::validate() const {
  if (bins < 1) throw InvalidInput("bins must be >= 1");
  if (top_k < 1) throw InvalidInput("top_k must be >= 1");
  if (port < 0 || port > 65535) throw InvalidInput("port out of range");
}

void apply_config(ServiceConfig& cfg, const Json& j) {
  if (!j.is_object()) throw InvalidInput("config must be a JSON object");
  try {
    if (j.contains("host")) cfg.host = j.at("host").get<std::string>();
    if (j.contains("port")) cfg.port = j.at("port").get<int>();
    if (j.contains("corpus")) cfg.corpus = j.at("corpus").get<std::string>();
    if (j.contains("bins")) cfg.bins = j.at("bins").get<std::size_t>();
    if (j.contains("top_k")) cfg.top_k = j.at("top_k").get<std::size_t>();
    if (j.contains("static_dir")) cfg.static_dir = j.at("static_dir").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("bad config value: ") + e.what());
  }
}

Json run_query(const CorpusStore& store, const std::string& query_text, std::size_t top, bool use_hash) {
  const BooleanQuery q = parse_query(query_text);
  RetrieveOptions opts;
  opts.use_hash = use_hash;
  return results_json(store, q, evaluate_boolean(store, q, opts, top));
}

Service::Service(ServiceConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  IndexOptions opts;
  opts.bins = cfg_.bins;
  auto st = std::make_shared<State>(State{CorpusStore(opts), {}});
  if (!cfg_.corpus.empty() && fs::exists(cfg_.corpus)) st->store = load(cfg_.corpus, opts);
  state_ = std::move(st);
}

std::shared_ptr<const Service::State> Service::state() const { return std::atomic_load(&state_); }

std::shared_ptr<const CorpusStore> Service::snapshot() const {
  auto st = state();
  return {st, &st->store};
}

HttpResult Service::post_document(const std::string& body, const std::string& doc_id, bool replace) {
  if (body.empty()) return error_result(400, "empty_body", "request body is empty");
  if (looks_like_png(body)) return error_result(400, "unsupported_format", "PNG input is not supported; send PGM");

  PageAnnotation page;
  std::shared_ptr<const std::string> image;
  try {
    if (looks_like_pgm(body)) {
      if (!safe_id(doc_id)) return error_result(400, "missing_doc_id", "raster uploads need a doc_id parameter");
      page = ingest_image(decode_pgm(body), doc_id);
      image = std::make_shared<const std::string>(body);
    } else {
      Json j;
      try {
        j = Json::parse(body);
      } catch (const nlohmann::json::exception& e) {
        return error_result(400, "undecodable", std::string("body is neither PGM nor JSON: ") + e.what());
      }
      page = annotation_from_json(j);
      if (!doc_id.empty()) page.doc_id = doc_id;
      if (!safe_id(page.doc_id)) return error_result(400, "missing_doc_id", "annotation needs a valid doc_id");
    }
  } catch (const NoTextContent& e) {
    return error_result(400, "no_text_content", e.what());
  } catch (const InvalidInput& e) {
    return error_result(400, "undecodable", e.what());
  }

  std::lock_guard lock(write_mu_);
  auto cur = state();
  if (!replace && cur->store.find(page.doc_id)) {
    return error_result(409, "duplicate_doc_id", "document already indexed: " + page.doc_id);
  }

  auto next = std::make_shared<State>(*cur);
  std::string source;
  if (image) {
    if (!cfg_.corpus.empty()) {
      const fs::path dir = fs::path(cfg_.corpus).concat(".images");
      fs::create_directories(dir);
      const fs::path file = dir / (page.doc_id + ".pgm");
      write_atomically(file, *image);
      source = file.string();
      next->images.erase(page.doc_id);
    } else {
      source = "memory:" + page.doc_id;
      next->images[page.doc_id] = image;
    }
  } else {
    next->images.erase(page.doc_id);
  }
  next->store.insert_document(make_document(page, source), replace);
  if (!cfg_.corpus.empty()) {
    fs::path tmp = cfg_.corpus;
    tmp += ".tmp";
    save(next->store, tmp);
    fs::rename(tmp, cfg_.corpus);
  }
  std::atomic_store(&state_, std::shared_ptr<const State>(std::move(next)));
  return json_result(201, Json{{"doc_id", page.doc_id}});
}

HttpResult Service::post_query(const std::string& body, std::optional<std::size_t> top) const {
  auto store = snapshot();
  try {
    return json_result(200, run_query(*store, body, top.value_or(cfg_.top_k)));
  } catch (const QueryError& e) {
    return error_result(422, "invalid_query", e.what());
  }
}

HttpResult Service::get_hypothesis(const std::string& doc_id, const std::string& hypothesis) const {
  auto store = snapshot();
  const Document* doc = store->find(doc_id);
  if (!doc) return error_result(404, "not_found", "unknown document: " + doc_id);
  auto h = parse_hypothesis(hypothesis);
  if (!h) return error_result(404, "not_found", "unknown hypothesis: " + hypothesis);
  return json_result(200, graph_to_json(doc->graph(*h)));
}

HttpResult Service::get_image(const std::string& doc_id) const {
  auto st = state();
  const Document* doc = st->store.find(doc_id);
  if (!doc) return error_result(404, "not_found", "unknown document: " + doc_id);
  if (auto it = st->images.find(doc_id); it != st->images.end()) return {200, *it->second, "image/x-portable-graymap"};
  if (doc->source.empty() || doc->source.rfind("memory:", 0) == 0) {
    return error_result(404, "not_found", "no raster source");
  }
  try {
    return {200, read_file(doc->source), "image/x-portable-graymap"};
  } catch (const InvalidInput&) {
    return error_result(404, "not_found", "raster source unavailable: " + doc->source);
  }
}

void Service::mount(httplib::Server& server) {
  auto send = [](httplib::Response& res, const HttpResult& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) { res.set_content("ok", "text/plain"); });
  server.Post("/documents", [this, send](const httplib::Request& req, httplib::Response& res) {
    const bool replace = req.get_param_value("replace") == "true" || req.get_param_value("replace") == "1";
    send(res, post_document(req.body, req.get_param_value("doc_id"), replace));
  });
  server.Post("/query", [this, send](const httplib::Request& req, httplib::Response& res) {
    std::optional<std::size_t> top;
    if (req.has_param("top")) {
      try {
        top = std::stoul(req.get_param_value("top"));
      } catch (const std::exception&) {
        send(res, error_result(422, "invalid_query", "top must be a positive integer"));
        return;
      }
      if (*top == 0) {
        send(res, error_result(422, "invalid_query", "top must be a positive integer"));
        return;
      }
    }
    send(res, post_query(req.body, top));
  });
  server.Get(R"(/documents/([^/]+)/hypotheses/([^/]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, get_hypothesis(req.matches[1], req.matches[2]));
  });
  server.Get(R"(/documents/([^/]+)/image)", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, get_image(req.matches[1]));
  });
  if (!cfg_.static_dir.empty()) server.set_mount_point("/", cfg_.static_dir);
}

bool serve(Service& service) {
  httplib::Server server;
  service.mount(server);
  const auto& cfg = service.config();
  std::cerr << "listening on " << cfg.host << ":" << cfg.port << "\n";
  return server.listen(cfg.host, cfg.port);
}

}  // namespace layoutsearch
