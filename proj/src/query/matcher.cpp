#include <algorithm>
#include <cmath>

#include "layoutsearch/query.hpp"

namespace layoutsearch {

namespace {

constexpr int kUnmapped = -1;

// Backtracking coupled traversal. Query nodes are processed in the order they
// get mapped; each node's four neighbor lists are aligned against the lists
// of its document image.
class Matcher {
 public:
  Matcher(const QueryLayout& q, const LayoutGraph& g)
      : q_(q),
        g_(g),
        map_(q.blocks.size(), kUnmapped),
        absorbed_(q.dummies.size()),
        owner_(g.size(), kUnmapped),
        absorb_count_(g.size(), 0) {}

  bool run(BlockId start) {
    if (!assignable(q_.reference, start)) return false;
    assign(q_.reference, start);
    return process(0, 0);
  }

  std::vector<BlockId> block_map() const {
    std::vector<BlockId> out;
    for (int b : map_) out.push_back(static_cast<BlockId>(b));
    return out;
  }

  std::vector<std::vector<BlockId>> dummy_map() const {
    std::vector<std::vector<BlockId>> out = absorbed_;
    for (auto& v : out) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    return out;
  }

 private:
  struct Undo {
    bool absorb;
    std::size_t node;
    BlockId block;
  };

  bool assignable(std::size_t node, BlockId b) const {
    return owner_[b] == kUnmapped && absorb_count_[b] == 0 && kind_compatible(q_.blocks[node].kind, g_.blocks[b].kind);
  }

  void assign(std::size_t node, BlockId b) {
    map_[node] = static_cast<int>(b);
    owner_[b] = static_cast<int>(node);
    order_.push_back(node);
    trail_.push_back({false, node, b});
  }

  void absorb(std::size_t dummy, BlockId b) {
    absorbed_[dummy].push_back(b);
    ++absorb_count_[b];
    trail_.push_back({true, dummy, b});
  }

  void undo_to(std::size_t mark) {
    while (trail_.size() > mark) {
      const Undo u = trail_.back();
      trail_.pop_back();
      if (u.absorb) {
        absorbed_[u.node].pop_back();
        --absorb_count_[u.block];
      } else {
        map_[u.node] = kUnmapped;
        owner_[u.block] = kUnmapped;
        order_.pop_back();
      }
    }
  }

  bool over_budget() { return ++steps_ > kMatchStepLimit; }

  bool process(std::size_t head, std::size_t dir) {
    if (head == order_.size()) return finish();
    if (dir == 4) return process(head + 1, 0);
    const std::size_t node = order_[head];
    const auto d = static_cast<Direction>(dir);
    const auto& ql = q_.neighbors_of(node, d);
    if (ql.empty()) return process(head, dir + 1);
    const auto& dl = g_.neighbors_of(static_cast<BlockId>(map_[node]), d);
    return align(ql, dl, 0, 0, head, dir);
  }

  // Aligns query list `ql` from position i against document list `dl` from j.
  bool align(const std::vector<BlockId>& ql, const std::vector<BlockId>& dl, std::size_t i, std::size_t j,
             std::size_t head, std::size_t dir) {
    if (over_budget()) return false;
    if (i == ql.size()) return j == dl.size() && process(head, dir + 1);
    std::size_t remaining = 0;  // non-dummies after position i
    for (std::size_t k = i + 1; k < ql.size(); ++k) remaining += q_.is_dummy(ql[k]) ? 0 : 1;
    const std::size_t node = ql[i];
    if (dl.size() - j < remaining + (q_.is_dummy(node) ? 0 : 1)) return false;

    if (!q_.is_dummy(node)) {
      const BlockId b = dl[j];
      if (map_[node] != kUnmapped) {
        return static_cast<BlockId>(map_[node]) == b && align(ql, dl, i + 1, j + 1, head, dir);
      }
      if (!assignable(node, b)) return false;
      const std::size_t mark = trail_.size();
      assign(node, b);
      if (align(ql, dl, i + 1, j + 1, head, dir)) return true;
      undo_to(mark);
      return false;
    }

    // A dummy takes a possibly empty run here; overall it must take something.
    const std::size_t dummy = node - q_.blocks.size();
    const std::size_t mark = trail_.size();
    if (align(ql, dl, i + 1, j, head, dir)) return true;
    for (std::size_t k = j; k + remaining < dl.size(); ++k) {
      if (owner_[dl[k]] != kUnmapped) break;
      absorb(dummy, dl[k]);
      if (align(ql, dl, i + 1, k + 1, head, dir)) return true;
    }
    undo_to(mark);
    return false;
  }

  // Queue drained: done if every block is mapped, otherwise cross a dummy to
  // reach a block that only touches vacancies.
  bool finish() {
    if (order_.size() == q_.blocks.size()) {
      return std::none_of(absorbed_.begin(), absorbed_.end(), [](const auto& v) { return v.empty(); });
    }
    for (std::size_t u = 0; u < q_.blocks.size(); ++u) {
      if (map_[u] != kUnmapped) continue;
      std::vector<BlockId> cands;
      for (std::size_t k = 0; k < q_.dummies.size(); ++k) {
        if (absorbed_[k].empty()) continue;
        const std::size_t dn = q_.blocks.size() + k;
        for (Direction d : kDirections) {
          const auto& ql = q_.neighbors_of(dn, d);
          if (std::find(ql.begin(), ql.end(), u) == ql.end()) continue;
          for (BlockId x : absorbed_[k]) {
            for (BlockId c : g_.neighbors_of(x, d)) {
              if (assignable(u, c)) cands.push_back(c);
            }
          }
        }
      }
      if (cands.empty()) continue;
      std::sort(cands.begin(), cands.end());
      cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
      const std::size_t head = order_.size();
      for (BlockId c : cands) {
        if (over_budget()) return false;
        const std::size_t mark = trail_.size();
        assign(u, c);
        if (process(head, 0)) return true;
        undo_to(mark);
      }
      return false;
    }
    return false;
  }

  const QueryLayout& q_;
  const LayoutGraph& g_;
  std::vector<int> map_;
  std::vector<std::vector<BlockId>> absorbed_;
  std::vector<int> owner_;
  std::vector<std::uint16_t> absorb_count_;
  std::vector<std::size_t> order_;
  std::vector<Undo> trail_;
  std::size_t steps_ = 0;
};

// Cheap necessary conditions on the start block.
bool start_admissible(const QueryLayout& q, const LayoutGraph& g, BlockId start) {
  if (!kind_compatible(q.blocks[q.reference].kind, g.blocks[start].kind)) return false;
  for (Direction d : kDirections) {
    const auto& ql = q.neighbors_of(q.reference, d);
    if (ql.empty()) continue;
    const auto n = g.neighbors_of(start, d).size();
    const auto solid = static_cast<std::size_t>(std::count_if(ql.begin(), ql.end(), [&](BlockId x) { return !q.is_dummy(x); }));
    if (solid < ql.size() ? n < solid : n != solid) return false;
  }
  return true;
}

Rect bbox_of(const std::vector<Rect>& rs) {
  Rect u = rs.front();
  for (const auto& r : rs) u = unite(u, r);
  return u;
}

}  // namespace

std::optional<MatchResult> match_sublayout(const QueryLayout& layout, const LayoutGraph& graph, BlockId start) {
  if (start >= graph.size() || !start_admissible(layout, graph, start)) return std::nullopt;
  Matcher m(layout, graph);
  if (!m.run(start)) return std::nullopt;

  MatchResult r;
  r.doc_id = graph.doc_id;
  r.hypothesis = graph.hypothesis;
  r.block_map = m.block_map();
  r.dummy_map = m.dummy_map();
  std::vector<Rect> rs;
  for (BlockId b : r.block_map) rs.push_back(graph.blocks[b].bbox);
  for (const auto& v : r.dummy_map) {
    for (BlockId b : v) rs.push_back(graph.blocks[b].bbox);
  }
  r.match_bbox = bbox_of(rs);
  r.score = rank_score(layout, r, graph);
  return r;
}

double rank_score(const QueryLayout& layout, const MatchResult& match, const LayoutGraph& graph) {
  const std::size_t n = layout.blocks.size();
  std::vector<Rect> qs;
  std::vector<Rect> ds;
  for (std::size_t i = 0; i < n; ++i) {
    qs.push_back(layout.blocks[i].bbox);
    ds.push_back(graph.blocks[match.block_map[i]].bbox);
  }
  const Rect qf = bbox_of(qs);
  const Rect df = bbox_of(ds);
  auto norm = [](const Rect& r, const Rect& frame, double& u, double& v) {
    u = frame.w > 0 ? (r.cx() - frame.x) / frame.w : 0.5;
    v = frame.h > 0 ? (r.cy() - frame.y) / frame.h : 0.5;
  };

  double total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double aq = qs[i].w / qs[i].h;
    const double ab = ds[i].w / ds[i].h;
    const double aspect = std::abs(aq - ab) / std::max(aq, ab);
    double qu, qv, du, dv;
    norm(qs[i], qf, qu, qv);
    norm(ds[i], df, du, dv);
    const double position = std::hypot(qu - du, qv - dv);
    total += 0.5 * aspect + 0.5 * position;
  }
  return total / static_cast<double>(n);
}

}  // namespace layoutsearch
