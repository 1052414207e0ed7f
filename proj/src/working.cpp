#include "bitopt/working.hpp"

#include <algorithm>

#include "bitopt/error.hpp"
#include "bitopt/filter.hpp"

namespace bitopt {

namespace {

using Pairs = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

std::uint32_t subject_const(const Dictionary& d, const PatternTerm& t) { return d.subject_id(t.constant); }
std::uint32_t object_const(const Dictionary& d, const PatternTerm& t) { return d.object_id(t.constant); }

}  // namespace

Selection select_bitmat(const TripleStore& store, const TriplePattern& tp, const std::string& first_var) {
  if (tp.p.is_var) fail(ErrorKind::Unsupported, "unsupported-by-index: variable predicate in " + tp.to_string());
  const auto& d = store.dict();
  Selection sel;
  std::uint32_t p = d.predicate_id(tp.p.constant);
  if (!tp.o.is_var) {
    sel.kind = BitMatKind::PS;
    sel.slice = object_const(d, tp.o);
    sel.row = p;
  } else if (!tp.s.is_var) {
    sel.kind = BitMatKind::PO;
    sel.slice = subject_const(d, tp.s);
    sel.row = p;
  } else {
    sel.kind = (!first_var.empty() && first_var == tp.o.var && tp.s.var != tp.o.var) ? BitMatKind::OS : BitMatKind::SO;
    sel.slice = p;
  }
  sel.bm = store.bitmat(sel.kind, sel.slice);
  return sel;
}

std::vector<Dim> WorkingPattern::dims_of(const std::string& v) const {
  std::vector<Dim> out;
  if (!row_var.empty() && row_var == v) out.push_back(Dim::Row);
  if (col_var == v) out.push_back(Dim::Column);
  return out;
}

std::vector<std::string> WorkingPattern::vars() const {
  std::vector<std::string> out;
  if (!row_var.empty()) out.push_back(row_var);
  if (!col_var.empty() && col_var != row_var) out.push_back(col_var);
  return out;
}

WorkingPattern load_working(const TripleStore& store, const TriplePattern& tp, const std::string& first_var) {
  const auto& d = store.dict();
  WorkingPattern wp;
  wp.tp = tp;
  wp.source = select_bitmat(store, tp, first_var);
  const std::uint32_t n = d.num_nodes();
  const BitMat& src = *wp.source.bm;
  const std::uint32_t p = wp.source.row;
  Pairs pairs;

  if (!tp.s.is_var && !tp.o.is_var) {
    std::uint32_t s = subject_const(d, tp.s);
    if (p && s && src.test(p, s)) pairs.emplace_back(1, 1);
    wp.bm = BitMat::from_pairs(BitMatKind::Derived, 0, 1, 1, std::move(pairs));
  } else if (!tp.o.is_var) {
    wp.col_var = tp.s.var;
    if (p && p <= src.rows())
      for (auto s : src.row(p).positions()) pairs.emplace_back(1, d.node_of_subject(s));
    wp.bm = BitMat::from_pairs(BitMatKind::Derived, 0, 1, n, std::move(pairs));
  } else if (!tp.s.is_var) {
    wp.col_var = tp.o.var;
    if (p && p <= src.rows())
      for (auto o : src.row(p).positions()) pairs.emplace_back(1, d.node_of_object(o));
    wp.bm = BitMat::from_pairs(BitMatKind::Derived, 0, 1, n, std::move(pairs));
  } else {
    bool os = wp.source.kind == BitMatKind::OS;
    wp.row_var = os ? tp.o.var : tp.s.var;
    wp.col_var = os ? tp.s.var : tp.o.var;
    bool same = tp.s.var == tp.o.var;
    for (auto [r, c] : src.pairs()) {
      std::uint32_t s = os ? c : r, o = os ? r : c;
      std::uint32_t sn = d.node_of_subject(s), on = d.node_of_object(o);
      if (same && sn != on) continue;
      pairs.emplace_back(os ? on : sn, os ? sn : on);
    }
    wp.bm = BitMat::from_pairs(BitMatKind::Derived, 0, n, n, std::move(pairs));
  }
  return wp;
}

std::uint64_t semi_join(WorkingPattern& target, const WorkingPattern& source) {
  std::vector<std::string> shared;
  for (const auto& v : target.vars())
    if (source.has_var(v)) shared.push_back(v);
  for (const TriplePattern* tp : {static_cast<const TriplePattern*>(&target.tp), &source.tp})
    if (tp->p.is_var) fail(ErrorKind::Unsupported, "unsupported-by-index: join on a predicate variable");
  const auto before = target.count();
  if (shared.empty()) return 0;

  if (shared.size() == 1) {
    const auto& v = shared.front();
    BitArray mask = source.bm.fold(source.dims_of(v).front());
    for (auto dim : target.dims_of(v)) mask &= target.bm.fold(dim);
    for (auto dim : target.dims_of(v)) target.bm.unfold(mask, dim);
    return before - target.count();
  }

  // Both patterns carry exactly the same two variables.
  bool aligned = source.row_var == target.row_var;
  Pairs kept;
  for (auto [r, c] : target.bm.pairs())
    if (aligned ? source.bm.test(r, c) : source.bm.test(c, r)) kept.emplace_back(r, c);
  target.bm = BitMat::from_pairs(target.bm.kind(), target.bm.slice(), target.bm.rows(), target.bm.cols(), std::move(kept));
  return before - target.count();
}

std::uint64_t apply_filter(WorkingPattern& wp, const FilterExpr& conjunct, const Dictionary& dict) {
  auto vs = conjunct.vars();
  if (vs.size() != 1 || !wp.has_var(vs.front())) fail(ErrorKind::Contract, "load-time filter must mention exactly one variable of the pattern");
  const auto& v = vs.front();
  const auto before = wp.count();
  auto dims = wp.dims_of(v);
  BitArray present = wp.bm.fold(dims.front());
  BitArray mask(present.width());
  for (auto node : present.positions()) {
    const Term& term = dict.term_of_node(node);
    auto lookup = [&](const std::string& name) -> const Term* { return name == v ? &term : nullptr; };
    if (eval_filter(conjunct, lookup) == Truth::True) mask.set(node);
  }
  for (auto dim : dims) wp.bm.unfold(mask, dim);
  return before - wp.count();
}

}  // namespace bitopt
