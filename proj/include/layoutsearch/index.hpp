#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "layoutsearch/context_key.hpp"
#include "layoutsearch/layout_graph.hpp"

namespace layoutsearch {

inline constexpr std::size_t kDefaultBins = 4093;

// One document: four hypothesis graphs plus where it came from.
struct Document {
  std::string doc_id;
  PageDims page;
  double avg_char_height_doc = 0;
  std::array<LayoutGraph, 4> graphs;
  std::string source;  // image path or empty for annotation-only documents

  const LayoutGraph& graph(Hypothesis h) const { return graphs[static_cast<std::size_t>(h)]; }
};

Document make_document(const PageAnnotation& page, std::string source = {});

struct IndexEntry {
  std::uint32_t doc = 0;  // position in CorpusStore::documents()
  Hypothesis hypothesis = Hypothesis::H1;
  BlockId block = 0;
  std::uint32_t key = 0;  // encoded ContextKey

  auto operator<=>(const IndexEntry&) const = default;
};

struct Candidate {
  std::uint32_t doc = 0;
  Hypothesis hypothesis = Hypothesis::H1;
  BlockId block = 0;
  auto operator<=>(const Candidate&) const = default;
};

// Neighbor-count constraint of a lookup: exact (after clamping) or a lower bound.
struct CountConstraint {
  std::uint8_t min = 0;
  bool exact = false;
  bool operator==(const CountConstraint&) const = default;
};

// Possibly partial context descriptor. Absent fields match anything.
struct QueryDescriptor {
  std::optional<Kind> kind;
  std::optional<Location> location;
  std::array<CountConstraint, 4> counts{};
  std::optional<std::uint8_t> overlap_bits;  // required subset of the candidate's bits

  static QueryDescriptor exact(const ContextKey& key);
  bool fully_determined() const;
  bool admits(const ContextKey& key) const;
};

// Chained hash table over encoded context keys (bucket = k mod n) plus a
// coarse table keyed by (kind, location) for partial descriptors.
class HashIndex {
 public:
  static constexpr std::size_t kCoarseBins = 10;

  explicit HashIndex(std::size_t bins = kDefaultBins);

  void insert(const IndexEntry& e);
  void erase_document(std::uint32_t doc);

  std::size_t bins() const { return fine_.size(); }
  std::size_t size() const { return size_; }
  const std::vector<IndexEntry>& fine_bucket(std::size_t i) const { return fine_[i]; }
  const std::vector<IndexEntry>& coarse_bucket(std::size_t i) const { return coarse_[i]; }
  static std::size_t coarse_slot(std::uint8_t kind, std::uint8_t location) {
    return static_cast<std::size_t>(kind) * 5 + location;
  }

 private:
  std::vector<std::vector<IndexEntry>> fine_;
  std::array<std::vector<IndexEntry>, kCoarseBins> coarse_;
  std::size_t size_ = 0;
};

struct IndexOptions {
  std::size_t bins = kDefaultBins;
  // Hypotheses whose graphs are indexed and searched.
  std::array<bool, 4> hypotheses = {true, true, true, true};
};

// Documents plus their index. Built by a single writer; afterwards safe to
// share read-only across threads.
class CorpusStore {
 public:
  explicit CorpusStore(IndexOptions options = {});

  // Throws DuplicateDocument when the id exists and `replace` is false.
  void insert_document(Document doc, bool replace = false);

  const std::vector<Document>& documents() const { return documents_; }
  const Document* find(const std::string& doc_id) const;
  const HashIndex& index() const { return index_; }
  const IndexOptions& options() const { return options_; }
  bool indexes(Hypothesis h) const { return options_.hypotheses[static_cast<std::size_t>(h)]; }

  std::vector<Candidate> candidate_lookup(const QueryDescriptor& q) const;

 private:
  IndexOptions options_;
  std::vector<Document> documents_;
  std::unordered_map<std::string, std::uint32_t> by_id_;
  HashIndex index_;
};

// JSON-lines persistence, one document per line. The index is rebuilt on load.
void save(const CorpusStore& store, const std::filesystem::path& path);
CorpusStore load(const std::filesystem::path& path, IndexOptions options = {});
CorpusStore load_from_string(const std::string& text, IndexOptions options = {});

struct IndexStats {
  std::size_t documents = 0;
  std::size_t entries = 0;
  std::size_t bins = 0;
  std::size_t empty_bins = 0;
  std::size_t max_chain = 0;
  double load_factor = 0;
  std::vector<std::size_t> chain_histogram;  // [i] = bins holding i entries (last slot: >=)
};

IndexStats index_stats(const CorpusStore& store);

}  // namespace layoutsearch
