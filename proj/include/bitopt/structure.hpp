#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bitopt/query.hpp"

namespace bitopt {

/// One OPT-free BGP of the query.
struct Supernode {
  int id = 0;                 // BGP position in depth-first order
  std::vector<int> patterns;  // local pattern indexes
};

/// A coalesced set of supernodes: SN_abs, or one peer group of slaves.
struct SnGroup {
  std::vector<int> supernodes;
  std::vector<int> patterns;
  int master = -1;  // direct master group, -1 for SN_abs
  std::vector<int> slaves;
};

/// Graph of supernodes. `uni` and `bi` hold the raw edges over supernodes; `groups`
/// is the coalesced view in sn-order (masters before slaves, groups[0] is SN_abs).
struct GoSN {
  std::vector<Supernode> supernodes;
  std::vector<std::pair<int, int>> uni;  // master -> slave
  std::vector<std::pair<int, int>> bi;   // stored with first < second
  std::vector<bool> absolute;
  std::vector<SnGroup> groups;
  std::vector<int> group_of_sn;
  std::vector<int> group_of_pattern;

  /// True iff `master` reaches `slave` through one or more master links.
  bool masters(int master, int slave) const;
  /// `g` followed by all its transitive slave groups.
  std::vector<int> closure(int g) const;
  int depth(int g) const;
};

struct GotEdge {
  int a = 0, b = 0;
  std::vector<std::string> label;  // sorted
};

/// Graph of triple patterns with shared-variable edge labels.
struct GoT {
  int nodes = 0;
  std::vector<GotEdge> edges;

  std::vector<int> incident(int node) const;
  std::vector<int> neighbors(int node) const;
  const GotEdge* edge(int a, int b) const;
  /// Subgraph over `keep` with nodes renumbered 0..keep.size()-1 in the given order.
  GoT induced(const std::vector<int>& keep) const;
  bool connected() const;
};

/// Classes are the connected components of the label subset relation.
int equivalence_classes(const std::vector<const std::vector<std::string>*>& labels);
int equivalence_classes(const GoT& got, const std::vector<int>& edge_ids);

struct Acyclicity {
  bool acyclic = false;
  std::vector<int> order;  // leaf removal order, complete only when acyclic
};

/// Leaf elimination where a leaf has at most one equivalence class of incident edges.
/// Searches over removal orders, so the answer does not depend on tie-breaking.
Acyclicity is_acyclic(const GoT& got);

enum class PruneRegime {
  Acyclic,     // per-group bottom-up and top-down passes
  AbsCycles,   // greedy over SN_abs, bottom-up/top-down over the slaves
  Greedy,      // one global greedy order
};
const char* to_string(PruneRegime r);

struct StructureReport {
  bool connected = false;
  bool well_designed = false;
  bool got_acyclic = false;
  bool slaves_acyclic = false;
  bool abs_acyclic = false;
  bool one_equiv_class_per_pair = false;
  bool slaves_connected = false;  // no slave group falls apart without its master
  bool interfaces_covered = false;  // each slave has one pattern holding every variable shared with its masters
  bool nb_required = true;
  PruneRegime regime = PruneRegime::Greedy;
};

struct AttachedFilter {
  FilterExpr expr;
  int group = 0;
};

/// Everything the engine derives from one UNION-free pattern tree.
struct QueryStructure {
  NodePtr root;
  std::vector<TriplePattern> tps;  // local order = depth-first order
  GoSN gosn;
  GoT got;
  StructureReport report;
  std::vector<AttachedFilter> filters;

  std::vector<std::string> variables() const;
};

GoSN build_gosn(const NodePtr& union_free_root);
GoT build_got(const GoSN& gosn, const std::vector<TriplePattern>& tps);
StructureReport classify(const GoSN& gosn, const GoT& got, const std::vector<TriplePattern>& tps);
/// Every pair of the listed patterns that shares a variable, nodes renumbered as in `ids`.
GoT sharing_graph(const std::vector<TriplePattern>& tps, const std::vector<int>& ids);
/// Builds and classifies. Throws Error(Rejected) for a non-well-designed tree.
QueryStructure analyze(const NodePtr& union_free_root);

/// Shared variables of two patterns, sorted.
std::vector<std::string> shared_vars(const TriplePattern& a, const TriplePattern& b);

}  // namespace bitopt
