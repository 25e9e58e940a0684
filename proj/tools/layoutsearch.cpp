// layoutsearch: ingest page images, build and inspect the block index, run
// sketch queries, generate synthetic corpora, evaluate, and serve over HTTP.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "layoutsearch/error.hpp"
#include "layoutsearch/eval.hpp"
#include "layoutsearch/ingest.hpp"
#include "layoutsearch/json_io.hpp"
#include "layoutsearch/service.hpp"

namespace fs = std::filesystem;
using namespace layoutsearch;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& bytes) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + p.string());
  out << bytes;
}

Json read_json(const fs::path& p) {
  try {
    return Json::parse(slurp(p));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(p.string() + ": " + e.what());
  }
}

// Files of a directory with the given extension, in name order.
std::vector<fs::path> files_with(const fs::path& dir, const std::string& ext) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ext) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Settings a --config file may override when the flag itself was not given.
struct Settings {
  std::string corpus;
  std::size_t bins = kDefaultBins;
  std::size_t top = 20;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;
};

void apply_config_file(const std::string& path, CLI::App& sub, Settings& s) {
  if (path.empty()) return;
  const Json j = read_json(path);
  if (!j.is_object()) throw InvalidInput("config must be a JSON object");
  auto unset = [&](const char* flag) {
    auto* opt = sub.get_option_no_throw(flag);
    return opt == nullptr || opt->count() == 0;
  };
  try {
    if (j.contains("corpus") && unset("--corpus")) s.corpus = j.at("corpus").get<std::string>();
    if (j.contains("bins") && unset("--bins")) s.bins = j.at("bins").get<std::size_t>();
    if (j.contains("top_k") && unset("--top")) s.top = j.at("top_k").get<std::size_t>();
    if (j.contains("host") && unset("--host")) s.host = j.at("host").get<std::string>();
    if (j.contains("port") && unset("--port")) s.port = j.at("port").get<int>();
    if (j.contains("static_dir") && unset("--static")) s.static_dir = j.at("static_dir").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("bad config value: ") + e.what());
  }
}

std::string require_corpus(const Settings& s) {
  if (!s.corpus.empty()) return s.corpus;
  throw InvalidInput("no corpus given (use --corpus or LAYOUTSEARCH_CORPUS)");
}

IndexOptions index_options(const Settings& s) {
  if (s.bins < 1) throw InvalidInput("bins must be >= 1");
  IndexOptions o;
  o.bins = s.bins;
  return o;
}

void print_hits(std::ostream& os, const Json& results) {
  std::size_t rank = 0;
  for (const auto& r : results.at("results")) {
    os << ++rank << "\t" << r.at("doc_id").get<std::string>() << "\t";
    if (r.at("score").is_null()) os << "-";
    else os << std::fixed << std::setprecision(4) << r.at("score").get<double>();
    for (const auto& m : r.at("matches")) {
      const auto& b = m.at("bbox");
      os << "\t" << m.at("layout").get<std::string>() << "@" << m.at("hypothesis").get<std::string>() << "[" << b.at("x")
         << "," << b.at("y") << "," << b.at("w") << "," << b.at("h") << "]";
    }
    os << "\n";
  }
}

std::vector<NamedLayout> load_battery(const fs::path& dir) {
  std::vector<NamedLayout> out;
  for (const auto& f : files_with(dir, ".json")) {
    BooleanQuery q = parse_query(slurp(f));
    for (auto& [name, layout] : q.layouts) out.push_back({name, std::move(layout)});
  }
  if (out.empty()) throw InvalidInput("no query files in " + dir.string());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sub-layout document image retrieval"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON file with option overrides")->check(CLI::ExistingFile);

  Settings s;
  if (const char* env = std::getenv("LAYOUTSEARCH_CORPUS")) s.corpus = env;

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Segment a page image into block annotations");
  std::string in_image, in_blocks, in_out, in_doc_id;
  ArlsaParams arlsa;
  ingest->add_option("image", in_image, "PGM page image")->check(CLI::ExistingFile);
  ingest->add_option("--blocks", in_blocks, "Pre-segmented block annotation JSON (skips raster processing)")
      ->check(CLI::ExistingFile);
  ingest->add_option("--out", in_out, "Output annotation JSON (stdout when absent)");
  ingest->add_option("--doc-id", in_doc_id, "Document id (default: file stem)");
  ingest->add_option("--a", arlsa.gap_factor, "ARLSA gap factor")->capture_default_str();
  ingest->add_option("--r", arlsa.height_ratio, "ARLSA height ratio")->capture_default_str();

  // index
  auto* index = app.add_subcommand("index", "Build or inspect a corpus index");
  index->require_subcommand(1);
  auto* build = index->add_subcommand("build", "Index a directory of annotations and/or PGM images");
  std::string build_dir, build_out;
  bool build_raster = false;
  build->add_option("--corpus", build_dir, "Input directory")->required()->check(CLI::ExistingDirectory);
  build->add_option("--out", build_out, "Output corpus JSON-lines file")->required();
  build->add_option("--bins", s.bins, "Hash bins")->capture_default_str();
  build->add_flag("--raster", build_raster, "Prefer <id>.pgm over <id>.json when both exist");
  auto* stats = index->add_subcommand("stats", "Bucket statistics of a corpus");
  bool stats_json = false;
  stats->add_option("corpus", s.corpus, "Corpus JSON-lines file");
  stats->add_option("--bins", s.bins, "Hash bins")->capture_default_str();
  stats->add_flag("--json", stats_json, "Machine-readable output");

  // query
  auto* query = app.add_subcommand("query", "Run a sketch query");
  std::string q_file;
  bool q_no_hash = false, q_json = false;
  query->add_option("--corpus", s.corpus, "Corpus JSON-lines file");
  query->add_option("--query", q_file, "Query JSON")->required()->check(CLI::ExistingFile);
  query->add_option("--top", s.top, "Maximum documents returned")->capture_default_str();
  query->add_option("--bins", s.bins, "Hash bins")->capture_default_str();
  query->add_flag("--no-hash", q_no_hash, "Try every block as a start (brute force)");
  query->add_flag("--json", q_json, "Print the JSON response");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with ground truth");
  SynthParams sp;
  std::string sy_plant, sy_out;
  bool sy_raster = false;
  std::size_t sy_battery = 0;
  std::uint64_t sy_battery_seed = 0;
  synth->add_option("--seed", sp.seed, "Random seed")->capture_default_str();
  synth->add_option("--docs", sp.docs, "Number of pages")->capture_default_str();
  synth->add_option("--plant", sy_plant, "Query JSON whose layouts are planted")->check(CLI::ExistingFile);
  synth->add_option("--battery", sy_battery, "Random queries per type to write to <out>/battery and plant");
  synth->add_option("--battery-seed", sy_battery_seed, "Seed of the random battery (default: --seed)");
  synth->add_option("--plant-rate", sp.plant_rate, "Per-page planting probability (>= 1: every page)");
  synth->add_option("--decoy-rate", sp.decoy_rate, "Per-planting decoy probability")->capture_default_str();
  synth->add_option("--background-decoys", sp.background_decoys, "Expected decoys per page outside plantings")
      ->capture_default_str();
  synth->add_option("--min-depth", sp.min_depth, "Minimum guillotine levels")->capture_default_str();
  synth->add_option("--max-depth", sp.max_depth, "Maximum guillotine levels")->capture_default_str();
  synth->add_option("--char-height", sp.char_height, "Glyph height in pixels")->capture_default_str();
  synth->add_option("--gutter-chars", sp.gutter_chars, "Gutter between blocks in character heights")
      ->capture_default_str();
  synth->add_option("--out", sy_out, "Output directory")->required();
  synth->add_flag("--raster", sy_raster, "Also render every page as PGM");

  // eval
  auto* eval = app.add_subcommand("eval", "Recall/precision/time per query type");
  std::string ev_battery, ev_report, ev_truth;
  std::size_t ev_runs = 10;
  bool ev_no_hash = false;
  eval->add_option("--corpus", s.corpus, "Corpus JSON-lines file");
  eval->add_option("--battery", ev_battery, "Directory of query JSON files")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--truth", ev_truth, "Ground truth JSON from synth")->check(CLI::ExistingFile);
  eval->add_option("--report", ev_report, "Report JSON output (stdout when absent)");
  eval->add_option("--runs", ev_runs, "Timing runs per query")->capture_default_str();
  eval->add_option("--bins", s.bins, "Hash bins")->capture_default_str();
  eval->add_flag("--no-hash", ev_no_hash, "Evaluate the brute-force path");

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "HTTP service");
  serve_cmd->add_option("--corpus", s.corpus, "Corpus JSON-lines file (created on first write)");
  serve_cmd->add_option("--host", s.host, "Listen address")->capture_default_str();
  serve_cmd->add_option("--port", s.port, "Listen port")->capture_default_str();
  serve_cmd->add_option("--bins", s.bins, "Hash bins")->capture_default_str();
  serve_cmd->add_option("--top", s.top, "Default top-k")->capture_default_str();
  serve_cmd->add_option("--static", s.static_dir, "Static asset directory")->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    for (auto* sub : {ingest, build, stats, query, synth, eval, serve_cmd}) {
      if (sub->parsed()) apply_config_file(config_path, *sub, s);
    }

    if (ingest->parsed()) {
      PageAnnotation page;
      if (!in_blocks.empty()) {
        page = annotation_from_json(read_json(in_blocks));
        if (!in_doc_id.empty()) page.doc_id = in_doc_id;
        if (page.doc_id.empty()) page.doc_id = fs::path(in_blocks).stem().string();
      } else {
        if (in_image.empty()) throw InvalidInput("ingest needs an image or --blocks");
        const std::string id = in_doc_id.empty() ? fs::path(in_image).stem().string() : in_doc_id;
        page = ingest_image(read_pgm(in_image), id, arlsa);
      }
      const std::string out = dump(annotation_to_json(page), 2) + "\n";
      if (in_out.empty()) std::cout << out;
      else spit(in_out, out);
      return 0;
    }

    if (build->parsed()) {
      CorpusStore store(index_options(s));
      std::map<std::string, fs::path> json_by_id, pgm_by_id;
      for (const auto& f : files_with(build_dir, ".json")) json_by_id[f.stem().string()] = f;
      for (const auto& f : files_with(build_dir, ".pgm")) pgm_by_id[f.stem().string()] = f;
      std::set<std::string> ids;
      for (const auto& [id, _] : json_by_id) ids.insert(id);
      for (const auto& [id, _] : pgm_by_id) ids.insert(id);
      std::size_t skipped = 0;
      for (const auto& id : ids) {
        const bool has_json = json_by_id.count(id) != 0;
        const bool has_pgm = pgm_by_id.count(id) != 0;
        if (has_pgm && (build_raster || !has_json)) {
          const fs::path p = pgm_by_id[id];
          store.insert_document(make_document(ingest_image(read_pgm(p), id), fs::absolute(p).string()));
          continue;
        }
        const Json j = read_json(json_by_id[id]);
        if (!j.is_object() || !j.contains("blocks")) {
          ++skipped;  // ground truth, queries, other JSON
          continue;
        }
        PageAnnotation page = annotation_from_json(j);
        if (page.doc_id.empty()) page.doc_id = id;
        std::string source;
        if (has_pgm) source = fs::absolute(pgm_by_id[id]).string();
        store.insert_document(make_document(page, source));
      }
      save(store, build_out);
      std::cerr << "indexed " << store.documents().size() << " documents, " << store.index().size() << " entries";
      if (skipped) std::cerr << " (" << skipped << " non-annotation JSON files skipped)";
      std::cerr << "\n";
      return 0;
    }

    if (stats->parsed()) {
      const CorpusStore store = load(require_corpus(s), index_options(s));
      const IndexStats st = index_stats(store);
      if (stats_json) {
        Json j = Json::object();
        j["documents"] = st.documents;
        j["entries"] = st.entries;
        j["bins"] = st.bins;
        j["empty_bins"] = st.empty_bins;
        j["max_chain"] = st.max_chain;
        j["load_factor"] = st.load_factor;
        j["chain_histogram"] = st.chain_histogram;
        std::cout << dump(j, 2) << "\n";
      } else {
        std::cout << "documents   " << st.documents << "\n"
                  << "entries     " << st.entries << "\n"
                  << "bins        " << st.bins << " (" << st.empty_bins << " empty)\n"
                  << "load factor " << std::fixed << std::setprecision(3) << st.load_factor << "\n"
                  << "max chain   " << st.max_chain << "\n"
                  << "chain length histogram:\n";
        for (std::size_t i = 0; i < st.chain_histogram.size(); ++i) {
          if (!st.chain_histogram[i]) continue;
          std::cout << "  " << (i + 1 == st.chain_histogram.size() ? ">=" : "") << i << "\t" << st.chain_histogram[i] << "\n";
        }
      }
      return 0;
    }

    if (query->parsed()) {
      if (s.top < 1) throw InvalidInput("top must be >= 1");
      const CorpusStore store = load(require_corpus(s), index_options(s));
      const Json res = run_query(store, slurp(q_file), s.top, !q_no_hash);
      if (q_json) std::cout << dump(res) << "\n";
      else print_hits(std::cout, res);
      return 0;
    }

    if (synth->parsed()) {
      const fs::path out = sy_out;
      fs::create_directories(out);
      if (!sy_plant.empty()) {
        BooleanQuery q = parse_query(slurp(sy_plant));
        for (auto& [name, layout] : q.layouts) sp.plant.push_back({name, std::move(layout)});
      }
      if (sy_battery > 0) {
        auto battery = standard_battery(sy_battery_seed ? sy_battery_seed : sp.seed, sy_battery);
        fs::create_directories(out / "battery");
        for (const auto& nl : battery) spit(out / "battery" / (nl.name + ".json"), dump(layout_query_json(nl.name, nl.layout), 2) + "\n");
        for (auto& nl : battery) sp.plant.push_back(std::move(nl));
      }
      if (!sp.plant.empty() && sp.plant_rate == 0) sp.plant_rate = 1;
      const SynthCorpus corpus = synth_corpus(sp);
      for (const auto& page : corpus.pages) {
        spit(out / (page.doc_id + ".json"), dump(annotation_to_json(page)) + "\n");
        if (sy_raster) write_pgm(out / (page.doc_id + ".pgm"), render_page(page));
      }
      spit(out / "truth.json", dump(truth_to_json(corpus.truth), 2) + "\n");
      std::cerr << "wrote " << corpus.pages.size() << " pages, " << corpus.truth.plantings.size() << " plantings to "
                << out.string() << "\n";
      return 0;
    }

    if (eval->parsed()) {
      const CorpusStore store = load(require_corpus(s), index_options(s));
      GroundTruth truth;
      if (!ev_truth.empty()) truth = truth_from_json(read_json(ev_truth));
      EvalOptions opts;
      opts.timing_runs = ev_runs;
      opts.retrieve.use_hash = !ev_no_hash;
      const EvalReport report = evaluate(store, truth, load_battery(ev_battery), opts);
      Json j = report_json(report);
      j["corpus_documents"] = store.documents().size();
      const std::string text = dump(j, 2) + "\n";
      if (ev_report.empty()) std::cout << text;
      else spit(ev_report, text);
      return 0;
    }

    if (serve_cmd->parsed()) {
      ServiceConfig cfg;
      cfg.host = s.host;
      cfg.port = s.port;
      cfg.corpus = s.corpus;
      cfg.bins = s.bins;
      cfg.top_k = s.top;
      cfg.static_dir = s.static_dir;
      Service service(cfg);
      return serve(service) ? 0 : 1;
    }
  } catch (const QueryError& e) {
    std::cerr << "invalid query: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
