#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bitopt/structure.hpp"
#include "bitopt/working.hpp"

namespace bitopt {

/// target ⋉ source over `vars`.
struct SemiJoinStep {
  int target = 0;
  int source = 0;
  std::vector<std::string> vars;
  bool master_transfer = false;  // source sits in the target's master group

  friend bool operator==(const SemiJoinStep& a, const SemiJoinStep& b) {
    return a.target == b.target && a.source == b.source && a.vars == b.vars;
  }
};

struct GroupSchedule {
  int group = 0;
  std::vector<SemiJoinStep> bottom_up;
  std::vector<SemiJoinStep> top_down;
};

struct PruneSchedule {
  PruneRegime regime = PruneRegime::Acyclic;
  std::vector<int> sn_order;  // group indexes
  std::vector<SemiJoinStep> greedy;
  std::vector<GroupSchedule> groups;
};

/// Groups in sn-order. Groups are stored in that order already, so this is 0..k-1.
std::vector<int> order_supernodes(const GoSN& gosn);

/// Leaf-driven bottom-up order for one group and its reversed top-down counterpart.
GroupSchedule group_schedule(const QueryStructure& qs, int group, const std::vector<std::uint64_t>& counts);
/// Each pattern, taken group by group in ascending count, is reduced by every
/// already-processed GoT neighbor.
std::vector<SemiJoinStep> greedy_order(const QueryStructure& qs, const std::vector<int>& groups,
                                       const std::vector<std::uint64_t>& counts);
/// The complete schedule for fixed counts (used for explain and orientation hints).
PruneSchedule build_schedule(const QueryStructure& qs, const std::vector<std::uint64_t>& counts);

struct PruneLog {
  std::vector<int> load_order;
  std::vector<SemiJoinStep> active;    // semi-joins applied while loading
  std::vector<SemiJoinStep> executed;  // prune_triples steps in execution order
  std::vector<std::pair<int, FilterExpr>> load_filters;
};

struct LoadOptions {
  bool active_pruning = true;
  bool load_time_filters = true;
};

struct LoadedPatterns {
  std::vector<WorkingPattern> patterns;
  std::vector<AttachedFilter> residual_filters;
};

/// Loads working BitMats group by group (ascending count inside a group), applies
/// eligible single-variable filter conjuncts, and semi-joins each pattern with the
/// already-loaded master or peer patterns it shares variables with.
LoadedPatterns load_patterns(const QueryStructure& qs, const TripleStore& store, const LoadOptions& opts,
                             PruneLog* log = nullptr);

/// Runs the pruning schedule on the working BitMats. Counts are read live, group by group.
void prune_triples(const QueryStructure& qs, std::vector<WorkingPattern>& wps, PruneLog* log = nullptr);

std::string to_string(const SemiJoinStep& step, const std::vector<TriplePattern>& tps);

}  // namespace bitopt
