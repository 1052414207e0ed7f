#include "bitopt/filter.hpp"

namespace bitopt {

namespace {

Truth from_bool(bool b) { return b ? Truth::True : Truth::False; }

template <typename T>
Truth ordered(CmpOp op, const T& a, const T& b) {
  switch (op) {
    case CmpOp::Eq: return from_bool(a == b);
    case CmpOp::Ne: return from_bool(a != b);
    case CmpOp::Lt: return from_bool(a < b);
    case CmpOp::Le: return from_bool(a <= b);
    case CmpOp::Gt: return from_bool(a > b);
    case CmpOp::Ge: return from_bool(a >= b);
  }
  return Truth::Unknown;
}

}  // namespace

Truth compare_terms(CmpOp op, const Term& a, const Term& b) {
  if (a.kind != b.kind) return Truth::Unknown;
  switch (a.kind) {
    case TermKind::Integer: return ordered(op, std::stoll(a.value), std::stoll(b.value));
    case TermKind::Literal: return ordered(op, a.value, b.value);
    case TermKind::Iri:
      if (op == CmpOp::Eq) return from_bool(a.value == b.value);
      if (op == CmpOp::Ne) return from_bool(a.value != b.value);
      return Truth::Unknown;
  }
  return Truth::Unknown;
}

Truth eval_filter(const FilterExpr& expr, const Lookup& lookup) {
  switch (expr.kind) {
    case FilterExpr::Kind::Compare: {
      auto resolve = [&](const PatternTerm& t) -> const Term* { return t.is_var ? lookup(t.var) : &t.constant; };
      const Term* a = resolve(expr.lhs);
      const Term* b = resolve(expr.rhs);
      if (!a || !b) return Truth::Unknown;
      return compare_terms(expr.op, *a, *b);
    }
    case FilterExpr::Kind::Not: {
      auto v = eval_filter(expr.args[0], lookup);
      return v == Truth::Unknown ? v : from_bool(v == Truth::False);
    }
    case FilterExpr::Kind::And: {
      auto l = eval_filter(expr.args[0], lookup), r = eval_filter(expr.args[1], lookup);
      if (l == Truth::False || r == Truth::False) return Truth::False;
      return l == Truth::True && r == Truth::True ? Truth::True : Truth::Unknown;
    }
    case FilterExpr::Kind::Or: {
      auto l = eval_filter(expr.args[0], lookup), r = eval_filter(expr.args[1], lookup);
      if (l == Truth::True || r == Truth::True) return Truth::True;
      return l == Truth::False && r == Truth::False ? Truth::False : Truth::Unknown;
    }
  }
  return Truth::Unknown;
}

std::vector<FilterExpr> conjuncts(const FilterExpr& expr) {
  if (expr.kind != FilterExpr::Kind::And) return {expr};
  auto out = conjuncts(expr.args[0]);
  auto rest = conjuncts(expr.args[1]);
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

std::optional<FilterExpr> conjoin(const std::vector<FilterExpr>& parts) {
  if (parts.empty()) return std::nullopt;
  FilterExpr acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = FilterExpr::all_of(std::move(acc), parts[i]);
  return acc;
}

FilterSplit classify_loadtime_filters(const FilterExpr& expr) {
  FilterSplit split;
  for (auto& c : conjuncts(expr)) {
    if (c.vars().size() == 1) split.load_time.push_back(std::move(c));
    else split.residual.push_back(std::move(c));
  }
  return split;
}

}  // namespace bitopt
