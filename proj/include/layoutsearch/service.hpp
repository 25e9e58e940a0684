#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "layoutsearch/index.hpp"
#include "layoutsearch/json_io.hpp"
#include "layoutsearch/raster.hpp"

namespace httplib {
class Server;
}

namespace layoutsearch {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string corpus;  // JSON-lines file; empty keeps the corpus in memory only
  std::size_t bins = kDefaultBins;
  std::size_t top_k = 20;
  std::string static_dir;

  // Throws InvalidInput.
  void validate() const;
};

// Applies the keys present in `j` (host, port, corpus, bins, top_k, static_dir).
void apply_config(ServiceConfig& cfg, const Json& j);

// Shared by `query --json` and POST /query so both interfaces answer with the
// same bytes. Throws QueryError.
Json run_query(const CorpusStore& store, const std::string& query_text, std::size_t top, bool use_hash = true);

struct HttpResult {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

// HTTP facade. Readers take a snapshot of the current store; writers are
// serialized, build a new store and publish it with one atomic swap.
class Service {
 public:
  explicit Service(ServiceConfig cfg);

  HttpResult post_document(const std::string& body, const std::string& doc_id, bool replace);
  HttpResult post_query(const std::string& body, std::optional<std::size_t> top) const;
  HttpResult get_hypothesis(const std::string& doc_id, const std::string& hypothesis) const;
  HttpResult get_image(const std::string& doc_id) const;

  std::shared_ptr<const CorpusStore> snapshot() const;
  const ServiceConfig& config() const { return cfg_; }

  void mount(httplib::Server& server);

 private:
  struct State {
    CorpusStore store;
    std::map<std::string, std::shared_ptr<const std::string>> images;  // uploads without a corpus file
  };
  std::shared_ptr<const State> state() const;

  ServiceConfig cfg_;
  std::shared_ptr<const State> state_;
  std::mutex write_mu_;
};

// Blocking; returns false when the socket cannot be bound.
bool serve(Service& service);

}  // namespace layoutsearch
