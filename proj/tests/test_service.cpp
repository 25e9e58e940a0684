#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <thread>

#include "doctest.h"
#include "httplib.h"

#include "layoutsearch/error.hpp"
#include "layoutsearch/eval.hpp"
#include "layoutsearch/raster.hpp"
#include "layoutsearch/service.hpp"

#include "support.hpp"

using namespace layoutsearch;
using namespace layoutsearch::testing;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("layoutsearch_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string annotation(const PageAnnotation& p) { return dump(annotation_to_json(p)); }

// Runs a shell command and returns (exit status, stdout).
std::pair<int, std::string> run(const std::string& cmd) {
  std::string out;
  FILE* f = popen(cmd.c_str(), "r");
  REQUIRE(f != nullptr);
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, f)) out.append(buf, n);
  const int status = pclose(f);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

const std::string kCli = LAYOUTSEARCH_CLI;

std::vector<PageAnnotation> small_corpus() {
  SynthParams p;
  p.seed = 30;
  p.docs = 25;
  p.plant = {{"A", parse_query(boolean_query()).layouts.at("A")}};
  p.plant_rate = 0.5;
  return synth_corpus(p).pages;
}

}  // namespace

TEST_SUITE("service") {

TEST_CASE("document uploads") {
  Service svc({});
  const PageAnnotation page = page_of("doc_a", {1000, 1000}, {text(100, 100, 800, 300), image(100, 450, 800, 400)});

  CHECK(svc.post_document(annotation(page), "", false).status == 201);
  CHECK(svc.snapshot()->documents().size() == 1);
  CHECK(svc.post_document(annotation(page), "", false).status == 409);
  const std::size_t entries = svc.snapshot()->index().size();
  CHECK(svc.post_document(annotation(page), "", true).status == 201);
  CHECK(svc.snapshot()->index().size() == entries);
  CHECK(svc.snapshot()->documents().size() == 1);

  CHECK(svc.post_document("", "x", false).status == 400);
  CHECK(svc.post_document(std::string("\x89PNG\r\n\x1a\n", 8) + "rest", "x", false).status == 400);
  CHECK(svc.post_document("not a page", "x", false).status == 400);
  CHECK(svc.post_document(R"({"doc_id":"x","page":{"w":10}})", "", false).status == 400);

  SUBCASE("raster upload") {
    const std::string pgm = encode_pgm(render_page(page_of("r", {600, 400}, {text(40, 40, 500, 120), image(40, 200, 500, 150)})));
    CHECK(svc.post_document(pgm, "", false).status == 400);  // raster needs a doc_id
    CHECK(svc.post_document(pgm, "scan1", false).status == 201);
    const HttpResult img = svc.get_image("scan1");
    CHECK(img.status == 200);
    CHECK(img.body == pgm);
    const std::string blank = encode_pgm(GrayImage(200, 200, 235));
    CHECK(svc.post_document(blank, "blank", false).status == 400);
  }
  SUBCASE("reads") {
    const HttpResult h = svc.get_hypothesis("doc_a", "H3");
    CHECK(h.status == 200);
    CHECK(Json::parse(h.body).at("id") == "H3");
    CHECK(svc.get_hypothesis("doc_a", "H9").status == 404);
    CHECK(svc.get_hypothesis("nope", "H1").status == 404);
    const HttpResult img = svc.get_image("doc_a");
    CHECK(img.status == 404);
    CHECK(img.body.find("no raster source") != std::string::npos);
  }
}

TEST_CASE("queries") {
  Service svc({});
  for (const auto& p : boolean_pages()) REQUIRE(svc.post_document(annotation(p), "", false).status == 201);
  const HttpResult r = svc.post_query(boolean_query(), std::nullopt);
  REQUIRE(r.status == 200);
  const Json j = Json::parse(r.body);
  REQUIRE(j.at("results").size() == 1);
  CHECK(j.at("results")[0].at("doc_id") == "doc1");
  CHECK(j.at("query_types").at("A") == 1);

  CHECK(svc.post_query("{", std::nullopt).status == 422);
  CHECK(svc.post_query(query_text({100, 100}, {{"A", boolean_a()}}, "NOT A"), std::nullopt).status == 422);
  CHECK(svc.post_query(query_text({100, 100}, {{"A", {{{0, 0, 60, 60}, QueryKind::Any}, {{30, 30, 60, 60}, QueryKind::Any}}}}, "A"), std::nullopt).status == 422);
  CHECK(svc.post_query(query_text({100, 100}, {{"A", boolean_a()}}, "A AND B"), std::nullopt).status == 422);
}

TEST_CASE("persistence through the corpus file") {
  TempDir dir("svc_persist");
  ServiceConfig cfg;
  cfg.corpus = (dir.path / "corpus.jsonl").string();
  std::string before;
  {
    Service svc(cfg);
    for (const auto& p : boolean_pages()) REQUIRE(svc.post_document(annotation(p), "", false).status == 201);
    const std::string pgm = encode_pgm(render_page(page_of("r", {600, 400}, {text(40, 40, 500, 120), image(40, 200, 500, 150)})));
    REQUIRE(svc.post_document(pgm, "scan1", false).status == 201);
    before = svc.post_query(boolean_query(), 5).body;
  }
  Service again(cfg);
  CHECK(again.snapshot()->documents().size() == 4);
  CHECK(again.post_query(boolean_query(), 5).body == before);
  CHECK(again.get_image("scan1").status == 200);
}

TEST_CASE("http server") {
  Service svc({});
  for (const auto& p : small_corpus()) REQUIRE(svc.post_document(annotation(p), "", false).status == 201);
  httplib::Server server;
  svc.mount(server);
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client cli("127.0.0.1", port);
  CHECK(cli.Get("/healthz")->status == 200);

  const std::string q = query_text({100, 100}, {{"A", boolean_a()}}, "A");
  const std::string expected = svc.post_query(q, 20).body;
  auto res = cli.Post("/query?top=20", q, "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->body == expected);
  CHECK(cli.Post("/query?top=0", q, "application/json")->status == 422);
  CHECK(cli.Post("/query?top=x", q, "application/json")->status == 422);

  // Concurrent readers plus a writer: every read equals one of the two
  // states the corpus passes through.
  const PageAnnotation extra = instance_page("extra", parse_query(q).layouts.at("A"), 9, 9, 300, 300);
  std::vector<std::future<std::string>> reads;
  for (int i = 0; i < 8; ++i) {
    reads.push_back(std::async(std::launch::async, [&] {
      httplib::Client c("127.0.0.1", port);
      auto r = c.Post("/query?top=20", q, "application/json");
      return r ? r->body : std::string("error");
    }));
  }
  auto up = cli.Post("/documents", annotation(extra), "application/json");
  REQUIRE(up);
  CHECK(up->status == 201);
  const std::string after = svc.post_query(q, 20).body;
  CHECK(after != expected);
  for (auto& f : reads) {
    const std::string body = f.get();
    CHECK((body == expected || body == after));
  }
  CHECK(cli.Post("/documents", annotation(extra), "application/json")->status == 409);
  CHECK(cli.Post("/documents?replace=true", annotation(extra), "application/json")->status == 201);
  CHECK(cli.Get("/documents/extra/hypotheses/H1")->status == 200);
  CHECK(cli.Get("/documents/extra/image")->status == 404);

  server.stop();
  th.join();
}

TEST_CASE("cli and http answer with the same bytes") {
  TempDir dir("svc_cli");
  const auto pages = small_corpus();
  const CorpusStore store = build_store(pages);
  const fs::path corpus = dir.path / "corpus.jsonl";
  save(store, corpus);
  const fs::path qf = dir.path / "q.json";
  const std::string q = query_text({100, 100}, {{"A", boolean_a()}}, "A");
  spit(qf, q);

  ServiceConfig cfg;
  cfg.corpus = corpus.string();
  Service svc(cfg);
  const std::string http = svc.post_query(q, 7).body;
  auto [code, out] = run(kCli + " query --corpus " + corpus.string() + " --query " + qf.string() + " --top 7 --json");
  CHECK(code == 0);
  CHECK(out == http + "\n");
  CHECK(http == dump(run_query(store, q, 7)));

  auto [nh, out_nh] = run(kCli + " query --corpus " + corpus.string() + " --query " + qf.string() + " --top 7 --json --no-hash");
  CHECK(nh == 0);
  CHECK(out_nh == out);

  spit(qf, "{");
  CHECK(run(kCli + " query --corpus " + corpus.string() + " --query " + qf.string() + " --json 2>/dev/null").first == 3);
}

TEST_CASE("configuration precedence") {
  TempDir dir("svc_cfg");
  const fs::path good = dir.path / "good.jsonl";
  save(build_store(boolean_pages()), good);
  const fs::path missing = dir.path / "missing.jsonl";
  const fs::path qf = dir.path / "q.json";
  spit(qf, boolean_query());
  const fs::path cfg_good = dir.path / "good.json", cfg_missing = dir.path / "missing.json";
  spit(cfg_good, dump(Json{{"corpus", good.string()}}));
  spit(cfg_missing, dump(Json{{"corpus", missing.string()}}));
  const std::string q = " query --query " + qf.string() + " --json 2>/dev/null";

  // Environment only.
  CHECK(run("LAYOUTSEARCH_CORPUS=" + good.string() + " " + kCli + q).first == 0);
  CHECK(run("LAYOUTSEARCH_CORPUS=" + missing.string() + " " + kCli + q).first != 0);
  // Config beats environment.
  CHECK(run("LAYOUTSEARCH_CORPUS=" + missing.string() + " " + kCli + " --config " + cfg_good.string() + q).first == 0);
  // Flag beats config.
  CHECK(run(kCli + " --config " + cfg_missing.string() + q + " --corpus " + good.string()).first == 0);
  CHECK(run(kCli + " --config " + cfg_good.string() + q + " --corpus " + missing.string()).first != 0);
  // No corpus at all.
  CHECK(run("env -u LAYOUTSEARCH_CORPUS " + kCli + q).first != 0);

  ServiceConfig cfg;
  apply_config(cfg, Json{{"port", 9000}, {"top_k", 5}});
  CHECK(cfg.port == 9000);
  CHECK(cfg.top_k == 5);
  CHECK(cfg.host == "127.0.0.1");
  CHECK_THROWS_AS(apply_config(cfg, Json{{"port", "high"}}), InvalidInput);
  CHECK_THROWS_AS(apply_config(cfg, Json::array()), InvalidInput);
  cfg.top_k = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
}

}  // TEST_SUITE
