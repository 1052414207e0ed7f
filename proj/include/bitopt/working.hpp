#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bitopt/bitmat.hpp"
#include "bitopt/query.hpp"
#include "bitopt/store.hpp"

namespace bitopt {

/// Which stored BitMat (or single row of one) a triple pattern reads.
struct Selection {
  BitMatKind kind = BitMatKind::SO;
  std::uint32_t slice = 0;
  std::uint32_t row = 0;  // 0 = whole matrix, else the single row used
  std::shared_ptr<const BitMat> bm;
};

/// Follows the selection table: (?v :p :o) reads row :p of P-S[:o], (:s :p ?v) row :p of
/// P-O[:s], (?a :p ?b) the S-O BitMat of :p, or O-S when `first_var` is the object variable.
/// Throws Error(Unsupported) for a variable predicate.
Selection select_bitmat(const TripleStore& store, const TriplePattern& tp, const std::string& first_var = "");

/// A query-local copy of a pattern's triples in node coordinates (see Dictionary).
/// Two-variable patterns are N x N; one-variable patterns are a single row over the
/// variable; (?x :p ?x) keeps only the diagonal; constant-only patterns are 1 x 1.
struct WorkingPattern {
  TriplePattern tp;
  int group = 0;
  std::string row_var;  // empty for single-row matrices
  std::string col_var;  // empty only for constant-only patterns
  BitMat bm;
  Selection source;

  std::uint64_t count() const { return bm.triple_count(); }
  bool has_var(const std::string& v) const { return (!row_var.empty() && row_var == v) || col_var == v; }
  bool diagonal() const { return !row_var.empty() && row_var == col_var; }
  /// Dimensions holding `v` (both for a diagonal pattern).
  std::vector<Dim> dims_of(const std::string& v) const;
  std::vector<std::string> vars() const;
};

WorkingPattern load_working(const TripleStore& store, const TriplePattern& tp, const std::string& first_var = "");

/// target ⋉ source over their shared variables. A single shared variable goes through
/// fold/AND/unfold; two shared variables intersect the matrices. Returns triples removed.
std::uint64_t semi_join(WorkingPattern& target, const WorkingPattern& source);

/// Keeps only triples whose binding of the conjunct's single variable makes it true.
std::uint64_t apply_filter(WorkingPattern& wp, const FilterExpr& conjunct, const Dictionary& dict);

/// Calls `emit(row_value, col_value)` for each triple agreeing with the fixed values;
/// 0 leaves a coordinate unconstrained.
template <typename F>
void for_each_match(const WorkingPattern& wp, std::uint32_t row_fixed, std::uint32_t col_fixed, F&& emit) {
  const auto& bm = wp.bm;
  if (wp.col_var.empty()) {
    if (bm.triple_count()) emit(0u, 0u);
    return;
  }
  if (wp.row_var.empty()) {
    if (col_fixed) {
      if (bm.test(1, col_fixed)) emit(0u, col_fixed);
    } else if (bm.rows() >= 1) {
      for (auto c : bm.row(1).positions()) emit(0u, c);
    }
    return;
  }
  if (wp.diagonal()) {
    std::uint32_t fixed = row_fixed ? row_fixed : col_fixed;
    if (fixed) {
      if (bm.test(fixed, fixed)) emit(fixed, fixed);
    } else {
      for (auto r : bm.nonempty_rows().positions()) emit(r, r);
    }
    return;
  }
  if (row_fixed && col_fixed) {
    if (bm.test(row_fixed, col_fixed)) emit(row_fixed, col_fixed);
  } else if (row_fixed) {
    if (row_fixed <= bm.rows())
      for (auto c : bm.row(row_fixed).positions()) emit(row_fixed, c);
  } else if (col_fixed) {
    for (auto r : bm.nonempty_rows().positions())
      if (bm.row(r).test(col_fixed)) emit(r, col_fixed);
  } else {
    for (auto r : bm.nonempty_rows().positions())
      for (auto c : bm.row(r).positions()) emit(r, c);
  }
}

}  // namespace bitopt
