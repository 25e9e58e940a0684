#include <algorithm>

#include "layoutsearch/error.hpp"
#include "layoutsearch/index.hpp"

namespace layoutsearch {

Document make_document(const PageAnnotation& page, std::string source) {
  Document doc;
  doc.doc_id = page.doc_id;
  doc.page = page.page;
  doc.avg_char_height_doc = page.avg_char_height_doc.value_or(derive_avg_char_height(page.blocks));
  PageAnnotation resolved = page;
  resolved.avg_char_height_doc = doc.avg_char_height_doc;
  doc.graphs = build_all_hypotheses(resolved);
  doc.source = std::move(source);
  return doc;
}

QueryDescriptor QueryDescriptor::exact(const ContextKey& key) {
  QueryDescriptor q;
  q.kind = static_cast<Kind>(key.kind);
  q.location = static_cast<Location>(key.location);
  for (std::size_t i = 0; i < 4; ++i) q.counts[i] = {key.counts[i], true};
  q.overlap_bits = key.overlap_bits;
  return q;
}

bool QueryDescriptor::fully_determined() const {
  return kind && location && overlap_bits &&
         std::all_of(counts.begin(), counts.end(), [](const CountConstraint& c) { return c.exact; });
}

bool QueryDescriptor::admits(const ContextKey& key) const {
  if (kind && static_cast<std::uint8_t>(*kind) != key.kind) return false;
  if (location && static_cast<std::uint8_t>(*location) != key.location) return false;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& c = counts[i];
    if (c.exact ? key.counts[i] != c.min : key.counts[i] < c.min) return false;
  }
  if (overlap_bits && (key.overlap_bits & *overlap_bits) != *overlap_bits) return false;
  return true;
}

HashIndex::HashIndex(std::size_t bins) : fine_(std::max<std::size_t>(bins, 1)) {}

void HashIndex::insert(const IndexEntry& e) {
  fine_[hash_key(e.key, fine_.size())].push_back(e);
  const ContextKey key = decode(e.key);
  coarse_[coarse_slot(key.kind, key.location)].push_back(e);
  ++size_;
}

void HashIndex::erase_document(std::uint32_t doc) {
  auto drop = [doc](std::vector<IndexEntry>& bucket) {
    return std::erase_if(bucket, [doc](const IndexEntry& e) { return e.doc == doc; });
  };
  std::size_t removed = 0;
  for (auto& b : fine_) removed += drop(b);
  for (auto& b : coarse_) drop(b);
  size_ -= removed;
}

CorpusStore::CorpusStore(IndexOptions options) : options_(options), index_(options.bins) {}

void CorpusStore::insert_document(Document doc, bool replace) {
  std::uint32_t slot;
  if (auto it = by_id_.find(doc.doc_id); it != by_id_.end()) {
    if (!replace) throw DuplicateDocument(doc.doc_id);
    slot = it->second;
    index_.erase_document(slot);
    documents_[slot] = std::move(doc);
  } else {
    slot = static_cast<std::uint32_t>(documents_.size());
    by_id_.emplace(doc.doc_id, slot);
    documents_.push_back(std::move(doc));
  }

  const Document& d = documents_[slot];
  for (Hypothesis h : kHypotheses) {
    if (!indexes(h)) continue;
    const LayoutGraph& g = d.graph(h);
    for (const auto& b : g.blocks) {
      index_.insert({slot, h, b.id, encode(context_key(g, b.id))});
    }
  }
}

const Document* CorpusStore::find(const std::string& doc_id) const {
  auto it = by_id_.find(doc_id);
  return it == by_id_.end() ? nullptr : &documents_[it->second];
}

std::vector<Candidate> CorpusStore::candidate_lookup(const QueryDescriptor& q) const {
  std::vector<Candidate> out;
  if (q.fully_determined()) {
    // Exact key: one chained bucket, filtered by key equality.
    ContextKey key;
    key.kind = static_cast<std::uint8_t>(*q.kind);
    key.location = static_cast<std::uint8_t>(*q.location);
    for (std::size_t i = 0; i < 4; ++i) key.counts[i] = q.counts[i].min;
    key.overlap_bits = *q.overlap_bits;
    const std::uint32_t k = encode(key);
    for (const auto& e : index_.fine_bucket(hash_key(k, index_.bins()))) {
      if (e.key == k) out.push_back({e.doc, e.hypothesis, e.block});
    }
  } else {
    for (std::uint8_t kind = 0; kind < 2; ++kind) {
      if (q.kind && static_cast<std::uint8_t>(*q.kind) != kind) continue;
      for (std::uint8_t loc = 0; loc < 5; ++loc) {
        if (q.location && static_cast<std::uint8_t>(*q.location) != loc) continue;
        for (const auto& e : index_.coarse_bucket(HashIndex::coarse_slot(kind, loc))) {
          if (q.admits(decode(e.key))) out.push_back({e.doc, e.hypothesis, e.block});
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

IndexStats index_stats(const CorpusStore& store) {
  constexpr std::size_t kHistogramSlots = 16;
  IndexStats s;
  s.documents = store.documents().size();
  s.entries = store.index().size();
  s.bins = store.index().bins();
  s.chain_histogram.assign(kHistogramSlots, 0);
  for (std::size_t i = 0; i < s.bins; ++i) {
    const std::size_t len = store.index().fine_bucket(i).size();
    if (len == 0) ++s.empty_bins;
    s.max_chain = std::max(s.max_chain, len);
    ++s.chain_histogram[std::min(len, kHistogramSlots - 1)];
  }
  s.load_factor = s.bins ? static_cast<double>(s.entries) / static_cast<double>(s.bins) : 0.0;
  return s;
}

}  // namespace layoutsearch
