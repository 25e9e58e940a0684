#include <algorithm>
#include <cctype>
#include <functional>
#include <set>

#include "layoutsearch/error.hpp"
#include "layoutsearch/json_io.hpp"
#include "layoutsearch/query.hpp"

namespace layoutsearch {

namespace {

struct Token {
  enum class T { Name, LParen, RParen, Comma, And, Or, Not, End } t;
  std::string text;
  std::size_t pos;
};

std::vector<Token> tokenize(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '(') {
      out.push_back({Token::T::LParen, "(", i++});
    } else if (c == ')') {
      out.push_back({Token::T::RParen, ")", i++});
    } else if (c == ',') {
      out.push_back({Token::T::Comma, ",", i++});
    } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
      const std::size_t start = i;
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_' || s[i] == '-')) ++i;
      std::string w = s.substr(start, i - start);
      auto t = Token::T::Name;
      if (w == "AND") t = Token::T::And;
      if (w == "OR") t = Token::T::Or;
      if (w == "NOT") t = Token::T::Not;
      out.push_back({t, std::move(w), start});
    } else {
      throw QueryError("unexpected character '" + std::string(1, c) + "' at " + std::to_string(i));
    }
  }
  out.push_back({Token::T::End, "", s.size()});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  std::unique_ptr<BoolExpr> parse() {
    auto e = parse_or();
    if (peek().t != Token::T::End) fail("unexpected '" + peek().text + "'");
    return e;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(i_ + k, toks_.size() - 1)]; }
  const Token& next() { return toks_[std::min(i_++, toks_.size() - 1)]; }
  [[noreturn]] void fail(const std::string& msg) const {
    throw QueryError("expression: " + msg + " at " + std::to_string(peek().pos));
  }
  void expect(Token::T t, const char* what) {
    if (peek().t != t) fail(std::string("expected ") + what);
    ++i_;
  }

  static std::unique_ptr<BoolExpr> node(BoolExpr::Op op, std::unique_ptr<BoolExpr> a, std::unique_ptr<BoolExpr> b = {}) {
    auto e = std::make_unique<BoolExpr>();
    e->op = op;
    e->children.push_back(std::move(a));
    if (b) e->children.push_back(std::move(b));
    return e;
  }

  std::unique_ptr<BoolExpr> parse_or() {
    auto lhs = parse_and();
    while (peek().t == Token::T::Or) {
      ++i_;
      lhs = node(BoolExpr::Op::Or, std::move(lhs), parse_and());
    }
    return lhs;
  }

  std::unique_ptr<BoolExpr> parse_and() {
    auto lhs = parse_unary();
    while (peek().t == Token::T::And) {
      ++i_;
      lhs = node(BoolExpr::Op::And, std::move(lhs), parse_unary());
    }
    return lhs;
  }

  std::unique_ptr<BoolExpr> parse_unary() {
    if (peek().t == Token::T::Not) {
      ++i_;
      return node(BoolExpr::Op::Not, parse_unary());
    }
    return parse_primary();
  }

  std::unique_ptr<BoolExpr> parse_primary() {
    if (peek().t == Token::T::Name) {
      auto e = std::make_unique<BoolExpr>();
      e->name = next().text;
      return e;
    }
    if (peek().t != Token::T::LParen) fail("expected layout name or '('");
    if (peek(1).t == Token::T::Name && peek(2).t == Token::T::Comma) {
      ++i_;
      auto e = std::make_unique<BoolExpr>();
      e->name = next().text;
      ++i_;
      if (peek().t != Token::T::Name) fail("expected region");
      e->region = parse_location(peek().text);
      if (!e->region) fail("unknown region '" + peek().text + "'");
      ++i_;
      expect(Token::T::RParen, "')'");
      return e;
    }
    ++i_;
    auto e = parse_or();
    expect(Token::T::RParen, "')'");
    return e;
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

void collect_atoms(const BoolExpr& e, bool negated, std::vector<std::pair<const BoolExpr*, bool>>& out) {
  if (e.op == BoolExpr::Op::Atom) {
    out.push_back({&e, !negated});
    return;
  }
  for (const auto& c : e.children) collect_atoms(*c, negated != (e.op == BoolExpr::Op::Not), out);
}

std::vector<QueryBlock> blocks_from_json(const Json& j) {
  if (!j.contains("blocks") || !j.at("blocks").is_array()) throw QueryError("layout needs a 'blocks' array");
  std::vector<QueryBlock> out;
  for (const auto& jb : j.at("blocks")) {
    QueryBlock b;
    for (const char* f : {"x", "y", "w", "h"}) {
      if (!jb.contains(f) || !jb.at(f).is_number()) throw QueryError(std::string("block needs numeric '") + f + "'");
    }
    b.bbox = {jb.at("x").get<double>(), jb.at("y").get<double>(), jb.at("w").get<double>(), jb.at("h").get<double>()};
    const std::string kind = jb.value("kind", std::string("any"));
    auto k = parse_query_kind(kind);
    if (!k) throw QueryError("unknown block kind '" + kind + "'");
    b.kind = *k;
    out.push_back(b);
  }
  return out;
}

PageDims canvas_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("w") || !j.contains("h") || !j.at("w").is_number() || !j.at("h").is_number()) {
    throw QueryError("canvas needs numeric 'w' and 'h'");
  }
  return {j.at("w").get<double>(), j.at("h").get<double>()};
}

}  // namespace

std::unique_ptr<BoolExpr> parse_expression(const std::string& text) { return Parser(tokenize(text)).parse(); }

bool has_positive_atom(const BoolExpr& e) {
  std::vector<std::pair<const BoolExpr*, bool>> atoms;
  collect_atoms(e, false, atoms);
  return std::any_of(atoms.begin(), atoms.end(), [](const auto& a) { return a.second; });
}

std::string to_string(const BoolExpr& e) {
  switch (e.op) {
    case BoolExpr::Op::Atom:
      return e.region ? "(" + e.name + "," + std::string(to_string(*e.region)) + ")" : e.name;
    case BoolExpr::Op::Not:
      return "(NOT " + to_string(*e.children[0]) + ")";
    case BoolExpr::Op::And:
      return "(" + to_string(*e.children[0]) + " AND " + to_string(*e.children[1]) + ")";
    case BoolExpr::Op::Or:
      return "(" + to_string(*e.children[0]) + " OR " + to_string(*e.children[1]) + ")";
  }
  return {};
}

BooleanQuery parse_query(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw QueryError(std::string("query is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw QueryError("query must be a JSON object");
  if (!j.contains("canvas")) throw QueryError("missing 'canvas'");
  if (!j.contains("layouts") || !j.at("layouts").is_object() || j.at("layouts").empty()) {
    throw QueryError("missing 'layouts'");
  }

  BooleanQuery q;
  q.canvas = canvas_from_json(j.at("canvas"));
  for (const auto& [name, jl] : j.at("layouts").items()) {
    const PageDims canvas = jl.contains("canvas") ? canvas_from_json(jl.at("canvas")) : q.canvas;
    try {
      q.layouts.emplace(name, make_layout(canvas, blocks_from_json(jl)));
    } catch (const QueryError& e) {
      throw QueryError("layout '" + name + "': " + e.what());
    }
  }

  std::string expr;
  if (j.contains("expr") && !j.at("expr").is_null()) {
    if (!j.at("expr").is_string()) throw QueryError("'expr' must be a string");
    expr = j.at("expr").get<std::string>();
  } else if (q.layouts.size() == 1) {
    expr = q.layouts.begin()->first;
  } else {
    throw QueryError("'expr' is required with more than one layout");
  }
  q.expr = parse_expression(expr);

  std::vector<std::pair<const BoolExpr*, bool>> atoms;
  collect_atoms(*q.expr, false, atoms);
  for (const auto& [a, pos] : atoms) {
    if (!q.layouts.count(a->name)) throw QueryError("unknown layout '" + a->name + "'");
  }
  if (!has_positive_atom(*q.expr)) throw QueryError("expression has no positive atom");
  return q;
}

std::vector<DocumentHit> evaluate_boolean(const CorpusStore& store, const BooleanQuery& q, RetrieveOptions opts,
                                          std::size_t top) {
  const auto& docs = store.documents();
  std::map<std::string, std::vector<std::vector<const MatchResult*>>> by_doc;
  std::map<std::string, std::vector<MatchResult>> results;
  std::vector<std::pair<const BoolExpr*, bool>> atoms;
  collect_atoms(*q.expr, false, atoms);
  for (const auto& [a, pos] : atoms) {
    if (results.count(a->name)) continue;
    auto& rs = results[a->name] = retrieve(store, q.layouts.at(a->name), opts);
    auto& grouped = by_doc[a->name];
    grouped.assign(docs.size(), {});
    for (const auto& m : rs) grouped[m.doc].push_back(&m);
  }

  auto passing = [&](const BoolExpr& atom, std::uint32_t d) {
    std::vector<const MatchResult*> out;
    for (const MatchResult* m : by_doc.at(atom.name)[d]) {
      if (region_predicate(m->match_bbox, docs[d].page, atom.region)) out.push_back(m);
    }
    return out;
  };

  std::function<bool(const BoolExpr&, std::uint32_t)> eval = [&](const BoolExpr& e, std::uint32_t d) -> bool {
    switch (e.op) {
      case BoolExpr::Op::Atom: return !passing(e, d).empty();
      case BoolExpr::Op::Not: return !eval(*e.children[0], d);
      case BoolExpr::Op::And: return eval(*e.children[0], d) && eval(*e.children[1], d);
      case BoolExpr::Op::Or: return eval(*e.children[0], d) || eval(*e.children[1], d);
    }
    return false;
  };

  std::vector<DocumentHit> hits;
  for (std::uint32_t d = 0; d < docs.size(); ++d) {
    if (!eval(*q.expr, d)) continue;
    DocumentHit hit;
    hit.doc_id = docs[d].doc_id;
    std::set<std::pair<std::string, std::optional<Location>>> seen;
    for (const auto& [a, pos] : atoms) {
      if (!pos || !seen.insert({a->name, a->region}).second) continue;
      for (const MatchResult* m : passing(*a, d)) {
        if (!hit.score || m->score < *hit.score) hit.score = m->score;
        hit.matches.push_back({a->name, *m});
      }
    }
    hits.push_back(std::move(hit));
  }
  std::sort(hits.begin(), hits.end(), [](const DocumentHit& a, const DocumentHit& b) {
    if (a.score.has_value() != b.score.has_value()) return a.score.has_value();
    if (a.score && *a.score != *b.score) return *a.score < *b.score;
    return a.doc_id < b.doc_id;
  });
  if (top > 0 && hits.size() > top) hits.resize(top);
  return hits;
}

}  // namespace layoutsearch
