#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "bitopt/dictionary.hpp"

namespace bitopt {

/// Subject, predicate or object slot of a triple pattern: a variable or a constant.
struct PatternTerm {
  bool is_var = false;
  std::string var;  // without the leading '?'
  Term constant;

  static PatternTerm variable(std::string name) { return {true, std::move(name), {}}; }
  static PatternTerm of(Term t) { return {false, {}, std::move(t)}; }

  std::string to_string() const { return is_var ? "?" + var : constant.to_display(); }
  friend bool operator==(const PatternTerm&, const PatternTerm&) = default;
};

struct TriplePattern {
  PatternTerm s, p, o;
  int index = 0;  // position in depth-first order over the whole query, 0-based

  /// Distinct variables in s, p, o order.
  std::vector<std::string> vars() const;
  std::string to_string() const;
  friend bool operator==(const TriplePattern& a, const TriplePattern& b) {
    return a.s == b.s && a.p == b.p && a.o == b.o;
  }
};

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };
const char* to_string(CmpOp op);

struct FilterExpr {
  enum class Kind { Compare, And, Or, Not };
  Kind kind = Kind::Compare;
  CmpOp op = CmpOp::Eq;
  PatternTerm lhs, rhs;
  std::vector<FilterExpr> args;

  static FilterExpr compare(CmpOp op, PatternTerm l, PatternTerm r);
  static FilterExpr all_of(FilterExpr a, FilterExpr b);
  static FilterExpr any_of(FilterExpr a, FilterExpr b);
  static FilterExpr negate(FilterExpr a);

  std::vector<std::string> vars() const;
  std::string to_string() const;
  friend bool operator==(const FilterExpr&, const FilterExpr&) = default;
};

enum class NodeKind { Bgp, Join, LeftJoin, Union, Filter };

struct PatternNode;
using NodePtr = std::shared_ptr<const PatternNode>;

struct PatternNode {
  NodeKind kind = NodeKind::Bgp;
  std::vector<TriplePattern> patterns;  // Bgp only
  NodePtr left, right;                  // binary nodes; Filter uses left as its inner pattern
  FilterExpr filter;                    // Filter only

  static NodePtr bgp(std::vector<TriplePattern> patterns);
  static NodePtr join(NodePtr l, NodePtr r);
  static NodePtr left_join(NodePtr l, NodePtr r);
  static NodePtr union_of(NodePtr l, NodePtr r);
  static NodePtr filtered(NodePtr inner, FilterExpr expr);

  bool binary() const { return kind == NodeKind::Join || kind == NodeKind::LeftJoin || kind == NodeKind::Union; }
};

struct Query {
  std::vector<std::string> projection;
  bool distinct = false;
  NodePtr root;
};

/// Variables occurring in triple patterns of the subtree, in first-appearance order.
std::vector<std::string> vars(const NodePtr& node);
/// Triple patterns in depth-first, left-to-right order.
std::vector<TriplePattern> patterns(const NodePtr& node);
/// BGP leaves in depth-first, left-to-right order.
std::vector<NodePtr> bgps(const NodePtr& node);
bool has_kind(const NodePtr& node, NodeKind kind);
/// The leftmost BGP leaf below `node`.
NodePtr leftmost_bgp(const NodePtr& node);

/// Renumbers triple pattern indexes in depth-first order; shares no nodes with the input.
NodePtr renumber(const NodePtr& node);

/// Structural equality (kinds, patterns and filters).
bool same_tree(const NodePtr& a, const NodePtr& b);

enum class BgpNaming { Numbered, Lettered };

/// Infix form over named BGPs, e.g. "(P1 ⋈ (P2 ∪ P3)) ⟕ P4".
std::string serialize(const NodePtr& node, BgpNaming naming = BgpNaming::Numbered);
/// Inverse of serialize for filter-free trees; `leaves` are the BGPs in naming order.
NodePtr parse_algebra(std::string_view text, const std::vector<NodePtr>& leaves);

/// Rejects a LeftJoin whose optional side leaks a variable not bound by its required side.
void check_well_designed(const NodePtr& root);
/// Rejects a Union where a variable used outside it occurs in only one branch.
void check_well_designed_unions(const NodePtr& root);
/// Rejects a Filter mentioning variables its inner pattern does not bind.
void check_safe_filters(const NodePtr& root);

Query parse_query(std::string_view text);

}  // namespace bitopt
