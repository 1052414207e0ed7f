#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bitopt/pruning.hpp"
#include "bitopt/rewriter.hpp"
#include "bitopt/structure.hpp"

namespace bitopt {

/// Node ids per header variable; 0 is NULL.
using Row = std::vector<std::uint32_t>;

struct ResultSet {
  std::vector<std::string> header;
  std::vector<Row> rows;
};

/// r1 ⊑ r2: r2 agrees with every non-null binding of r1 and binds strictly more.
bool subsumes(const Row& r1, const Row& r2);
/// Sorts, drops exact duplicates, then drops every row subsumed by another.
ResultSet best_match(ResultSet rs);
ResultSet project(const ResultSet& rs, const std::vector<std::string>& vars);
void sort_rows(ResultSet& rs);

/// SN_abs patterns by ascending count, then the remaining groups in sn-order.
std::vector<int> build_tporder(const QueryStructure& qs, const std::vector<std::uint64_t>& counts);
/// tporder reordered so every prefix is GoT-connected and masters precede slaves.
std::vector<int> build_stps(const QueryStructure& qs, const std::vector<std::uint64_t>& counts);

struct JoinOptions {
  bool nulreqd = false;
  bool unsafe_order = false;  // a failing slave pattern only nulls its own fresh variables
  bool partial_rows = false;  // keep what a group bound before it died (no nullification at all)
};

struct JoinStats {
  std::size_t vmap_cells = 0;
  std::size_t max_depth = 0;
  std::uint64_t calls = 0;
  std::uint64_t emitted = 0;
  std::uint64_t dropped = 0;
  bool filter_nullified = false;  // some residual filter nulled a slave group
  bool masters_first = true;      // every slave binding came after its masters' bindings
};

/// Depth-first pipelined join over `stps`. Rows carry every query variable.
ResultSet multi_way_join(const QueryStructure& qs, const std::vector<WorkingPattern>& wps, const std::vector<int>& stps,
                         const std::vector<AttachedFilter>& residual, const Dictionary& dict, const JoinOptions& opts,
                         JoinStats* stats = nullptr);

enum class Toggle { Auto, On, Off };

struct RunOptions {
  bool prune = true;
  bool unsafe_order = false;  // requires prune = false
  Toggle nullify = Toggle::Auto;
  Toggle best_match = Toggle::Auto;
  bool distinct_bmm = true;
};

struct DisjunctRun {
  QueryStructure qs;
  LoadedPatterns loaded;
  PruneLog log;
  std::vector<int> stps;
  bool nulreqd = false;
  JoinStats stats;
  ResultSet rows;  // full rows over the query's variables, before best-match
};

struct DistinctTrace {
  std::string path;    // "bmm", "bmm-opt" or "naive"
  std::string reason;  // why the naive path was taken
  std::map<int, std::vector<std::size_t>> node_counts;  // per group, MCS size after each shrink round
  std::vector<std::string> steps;
};

struct QueryRun {
  NodePtr pushed;
  UnfResult unf;
  std::vector<DisjunctRun> disjuncts;
  bool pruned = false;
  bool best_match_applied = false;
  ResultSet full;    // all disjuncts, after best-match when applied
  ResultSet result;  // projected (and DISTINCT-evaluated)
  DistinctTrace distinct;
};

QueryRun run_query(const Query& q, const TripleStore& store, const RunOptions& opts = {});
ResultSet evaluate(const Query& q, const TripleStore& store, const RunOptions& opts = {});

}  // namespace bitopt
