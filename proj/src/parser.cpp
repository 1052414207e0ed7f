#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <optional>

#include "bitopt/error.hpp"
#include "bitopt/query.hpp"

namespace bitopt {

namespace {

const std::map<std::string, std::string>& builtin_prefixes() {
  static const std::map<std::string, std::string> m = {
      {"", "http://example.org/"},
      {"rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"},
      {"rdfs", "http://www.w3.org/2000/01/rdf-schema#"},
      {"xsd", "http://www.w3.org/2001/XMLSchema#"},
  };
  return m;
}

bool name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text), prefixes_(builtin_prefixes()) {}

  Query query() {
    while (keyword("PREFIX")) prefix_decl();
    if (!keyword("SELECT")) error("expected SELECT");
    Query q;
    q.distinct = keyword("DISTINCT");
    bool star = false;
    if (accept('*')) {
      star = true;
    } else {
      while (peek_var()) q.projection.push_back(variable());
      if (q.projection.empty()) error("expected projection variables or '*'");
    }
    keyword("WHERE");
    auto root = group();
    ws();
    if (pos_ != text_.size()) error("unexpected trailing input");
    q.root = renumber(root);
    auto all = vars(q.root);
    if (star) q.projection = all;
    for (const auto& v : q.projection)
      if (std::find(all.begin(), all.end(), v) == all.end())
        fail(ErrorKind::Rejected, "projected variable ?" + v + " does not occur in the query pattern");
    check_safe_filters(q.root);
    check_well_designed(q.root);
    check_well_designed_unions(q.root);
    return q;
  }

 private:
  [[noreturn]] void error(const std::string& msg) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    fail(ErrorKind::Parse, "syntax error at " + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
  }

  void ws() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  char peek() {
    ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool accept(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  void expect(char c) {
    if (!accept(c)) error(std::string("expected '") + c + "'");
  }

  bool accept_str(std::string_view s) {
    ws();
    if (text_.substr(pos_).starts_with(s)) {
      pos_ += s.size();
      return true;
    }
    return false;
  }

  bool keyword(std::string_view kw) {
    ws();
    if (pos_ + kw.size() > text_.size()) return false;
    for (std::size_t i = 0; i < kw.size(); ++i)
      if (std::toupper(static_cast<unsigned char>(text_[pos_ + i])) != kw[i]) return false;
    if (pos_ + kw.size() < text_.size() && name_char(text_[pos_ + kw.size()])) return false;
    pos_ += kw.size();
    return true;
  }

  bool peek_var() {
    char c = peek();
    return c == '?' || c == '$';
  }

  std::string variable() {
    ++pos_;
    auto start = pos_;
    while (pos_ < text_.size() && name_char(text_[pos_])) ++pos_;
    if (start == pos_) error("empty variable name");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string iri_ref() {
    ++pos_;
    auto end = text_.find('>', pos_);
    if (end == std::string_view::npos) error("unterminated IRI");
    std::string v(text_.substr(pos_, end - pos_));
    pos_ = end + 1;
    return v;
  }

  std::string prefix_name() {
    auto start = pos_;
    while (pos_ < text_.size() && name_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  void prefix_decl() {
    ws();
    auto name = prefix_name();
    if (!accept(':')) error("expected ':' in PREFIX declaration");
    if (peek() != '<') error("expected IRI in PREFIX declaration");
    prefixes_[name] = iri_ref();
  }

  std::string prefixed() {
    auto start = pos_;
    auto prefix = prefix_name();
    if (pos_ >= text_.size() || text_[pos_] != ':') {
      pos_ = start;
      error("expected a term");
    }
    ++pos_;
    auto local_start = pos_;
    while (pos_ < text_.size() && (name_char(text_[pos_]) || text_[pos_] == '.')) ++pos_;
    while (pos_ > local_start && text_[pos_ - 1] == '.') --pos_;  // a trailing '.' ends the triple
    auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) {
      pos_ = start;
      fail(ErrorKind::Parse, "unknown prefix '" + prefix + ":'");
    }
    return it->second + std::string(text_.substr(local_start, pos_ - local_start));
  }

  std::string quoted() {
    ++pos_;
    std::string v;
    while (true) {
      if (pos_ >= text_.size()) error("unterminated string");
      char c = text_[pos_++];
      if (c == '"') return v;
      if (c == '\\' && pos_ < text_.size()) {
        char e = text_[pos_++];
        v += e == 'n' ? '\n' : e == 't' ? '\t' : e == 'r' ? '\r' : e;
      } else {
        v += c;
      }
    }
  }

  std::optional<Term> integer_literal() {
    auto start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
    auto digits = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (digits == pos_) {
      pos_ = start;
      return std::nullopt;
    }
    long long v = 0;
    auto first = text_.data() + (text_[start] == '+' ? start + 1 : start);
    auto [ptr, ec] = std::from_chars(first, text_.data() + pos_, v);
    if (ec != std::errc{}) error("integer out of range");
    return Term::integer(v);
  }

  PatternTerm term(bool predicate_slot) {
    char c = peek();
    if (c == '?' || c == '$') return PatternTerm::variable(variable());
    if (c == '<') return PatternTerm::of(Term::iri(iri_ref()));
    if (c == '"') {
      auto lexical = quoted();
      if (accept_str("^^")) {
        std::string dt = peek() == '<' ? iri_ref() : prefixed();
        if (dt != kXsdInteger) error("unsupported datatype <" + dt + ">");
        long long v = 0;
        auto [ptr, ec] = std::from_chars(lexical.data(), lexical.data() + lexical.size(), v);
        if (ec != std::errc{} || ptr != lexical.data() + lexical.size()) error("invalid integer literal");
        return PatternTerm::of(Term::integer(v));
      }
      return PatternTerm::of(Term::literal(std::move(lexical)));
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+') {
      if (auto t = integer_literal()) return PatternTerm::of(*t);
    }
    if (predicate_slot && c == 'a' && (pos_ + 1 >= text_.size() || !name_char(text_[pos_ + 1])) &&
        (pos_ + 1 >= text_.size() || text_[pos_ + 1] != ':')) {
      ++pos_;
      return PatternTerm::of(Term::iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type"));
    }
    if (name_char(c) || c == ':') return PatternTerm::of(Term::iri(prefixed()));
    if (c == '_') error("blank nodes are not supported");
    error("expected a term");
  }

  void triples_block(std::vector<TriplePattern>& out) {
    auto subject = term(false);
    if (!subject.is_var && subject.constant.kind != TermKind::Iri) error("literal in subject position");
    while (true) {
      auto predicate = term(true);
      if (!predicate.is_var && predicate.constant.kind != TermKind::Iri) error("predicate must be an IRI or variable");
      while (true) {
        auto object = term(false);
        out.push_back({subject, predicate, object, 0});
        if (!accept(',')) break;
      }
      if (!accept(';')) break;
      char c = peek();
      if (c == '.' || c == '}') break;
    }
  }

  static NodePtr join_into(NodePtr acc, NodePtr next) { return acc ? PatternNode::join(acc, next) : next; }

  NodePtr group() {
    expect('{');
    NodePtr acc;
    std::vector<TriplePattern> open;
    std::optional<FilterExpr> filter;
    auto flush = [&] {
      if (open.empty()) return;
      acc = join_into(acc, PatternNode::bgp(std::move(open)));
      open.clear();
    };
    while (true) {
      char c = peek();
      if (c == '}') {
        ++pos_;
        break;
      }
      if (c == '\0') error("unterminated group");
      if (c == '.') {
        ++pos_;
        continue;
      }
      if (keyword("OPTIONAL")) {
        flush();
        auto start = pos_;
        auto inner = group();
        if (!acc) {
          pos_ = start;
          fail(ErrorKind::Rejected, "OPTIONAL without a required pattern before it");
        }
        acc = PatternNode::left_join(acc, inner);
      } else if (keyword("FILTER")) {
        auto e = constraint();
        filter = filter ? FilterExpr::all_of(std::move(*filter), std::move(e)) : std::move(e);
      } else if (c == '{') {
        flush();
        auto g = group();
        while (keyword("UNION")) g = PatternNode::union_of(g, group());
        acc = join_into(acc, g);
      } else {
        triples_block(open);
      }
    }
    flush();
    if (!acc) error("empty group pattern");
    if (filter) acc = PatternNode::filtered(acc, std::move(*filter));
    return acc;
  }

  FilterExpr constraint() {
    expect('(');
    auto e = or_expr();
    expect(')');
    return e;
  }

  FilterExpr or_expr() {
    auto e = and_expr();
    while (accept_str("||")) e = FilterExpr::any_of(std::move(e), and_expr());
    return e;
  }

  FilterExpr and_expr() {
    auto e = unary();
    while (accept_str("&&")) e = FilterExpr::all_of(std::move(e), unary());
    return e;
  }

  FilterExpr unary() {
    if (peek() == '!' && !(pos_ + 1 < text_.size() && text_[pos_ + 1] == '=')) {
      ++pos_;
      return FilterExpr::negate(unary());
    }
    if (peek() == '(') {
      ++pos_;
      auto e = or_expr();
      expect(')');
      return e;
    }
    auto lhs = term(false);
    CmpOp op;
    if (accept_str("!=")) op = CmpOp::Ne;
    else if (accept_str("<=")) op = CmpOp::Le;
    else if (accept_str(">=")) op = CmpOp::Ge;
    else if (accept_str("=")) op = CmpOp::Eq;
    else if (accept_str("<")) op = CmpOp::Lt;
    else if (accept_str(">")) op = CmpOp::Gt;
    else error("expected comparison operator");
    auto rhs = term(false);
    if (!lhs.is_var && !rhs.is_var) error("comparison needs at least one variable");
    return FilterExpr::compare(op, std::move(lhs), std::move(rhs));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::map<std::string, std::string> prefixes_;
};

}  // namespace

Query parse_query(std::string_view text) { return Parser(text).query(); }

}  // namespace bitopt
