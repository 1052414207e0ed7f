#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bitopt/executor.hpp"

namespace bitopt {

/// One MCS node: an original pattern ("T3") or a BMM product ("B1").
struct McsNode {
  std::string name;
  WorkingPattern wp;  // diagonal patterns are stored as single-variable rows
};

/// Covering subgraph of one group's GoT. Edges are implied by shared variables.
struct Mcs {
  int group = 0;
  std::vector<McsNode> nodes;

  std::vector<std::string> vars() const;
  /// Edges between nodes sharing variables, labels sorted.
  std::vector<GotEdge> edges() const;
};

Mcs mcs_from_group(const QueryStructure& qs, const std::vector<WorkingPattern>& wps, int group);

/// Drops leaf nodes whose kept variables all appear in their widest neighbor, until
/// none qualifies. Needs minimal (fully pruned) BitMats.
Mcs carve_mcs(Mcs mcs, const std::set<std::string>& keep, std::vector<std::string>* steps = nullptr);

/// Folds away variables local to one node and multiplies the two endpoints of every
/// variable outside `keep` that joins exactly two nodes. Throws Error(Contract) if the
/// node count ever grows.
Mcs shrink_mcs(Mcs mcs, const std::set<std::string>& keep, DistinctTrace* trace = nullptr);

/// Sort, dedup and subsumption removal over already-projected rows.
ResultSet distinct_naive(const ResultSet& projected);

/// The BMM path; nullopt (with trace.reason set) when the query does not qualify.
std::optional<ResultSet> distinct_bmm(const Query& q, const QueryRun& run, const Dictionary& dict, DistinctTrace& trace);

}  // namespace bitopt
