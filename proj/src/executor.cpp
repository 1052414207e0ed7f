#include "bitopt/executor.hpp"

#include <algorithm>
#include <climits>
#include <map>
#include <set>

#include "bitopt/distinct.hpp"
#include "bitopt/error.hpp"
#include "bitopt/filter.hpp"

namespace bitopt {

bool subsumes(const Row& r1, const Row& r2) {
  if (r1.size() != r2.size()) return false;
  bool more = false;
  for (std::size_t i = 0; i < r1.size(); ++i) {
    if (r1[i] == 0) {
      more |= r2[i] != 0;
    } else if (r1[i] != r2[i]) {
      return false;
    }
  }
  return more;
}

void sort_rows(ResultSet& rs) { std::sort(rs.rows.begin(), rs.rows.end()); }

ResultSet best_match(ResultSet rs) {
  sort_rows(rs);
  rs.rows.erase(std::unique(rs.rows.begin(), rs.rows.end()), rs.rows.end());
  // Only rows with a NULL can be subsumed.
  std::vector<bool> drop(rs.rows.size(), false);
  for (std::size_t i = 0; i < rs.rows.size(); ++i) {
    if (std::find(rs.rows[i].begin(), rs.rows[i].end(), 0u) == rs.rows[i].end()) continue;
    for (std::size_t j = 0; j < rs.rows.size() && !drop[i]; ++j)
      if (j != i && subsumes(rs.rows[i], rs.rows[j])) drop[i] = true;
  }
  std::vector<Row> kept;
  for (std::size_t i = 0; i < rs.rows.size(); ++i)
    if (!drop[i]) kept.push_back(std::move(rs.rows[i]));
  rs.rows = std::move(kept);
  return rs;
}

ResultSet project(const ResultSet& rs, const std::vector<std::string>& vars) {
  std::vector<int> pos;
  for (const auto& v : vars) {
    auto it = std::find(rs.header.begin(), rs.header.end(), v);
    pos.push_back(it == rs.header.end() ? -1 : static_cast<int>(it - rs.header.begin()));
  }
  ResultSet out;
  out.header = vars;
  out.rows.reserve(rs.rows.size());
  for (const auto& r : rs.rows) {
    Row p;
    for (int i : pos) p.push_back(i < 0 ? 0 : r[i]);
    out.rows.push_back(std::move(p));
  }
  return out;
}

namespace {

std::vector<int> ascending(std::vector<int> ids, const std::vector<std::uint64_t>& counts) {
  std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
    return counts[a] != counts[b] ? counts[a] < counts[b] : a < b;
  });
  return ids;
}

std::vector<int> master_patterns(const QueryStructure& qs, int group) {
  std::vector<int> out;
  for (int m = qs.gosn.groups[group].master; m >= 0; m = qs.gosn.groups[m].master)
    out.insert(out.end(), qs.gosn.groups[m].patterns.begin(), qs.gosn.groups[m].patterns.end());
  return out;
}

}  // namespace

std::vector<int> build_tporder(const QueryStructure& qs, const std::vector<std::uint64_t>& counts) {
  std::vector<int> out;
  for (const auto& g : qs.gosn.groups) {
    auto ids = ascending(g.patterns, counts);
    out.insert(out.end(), ids.begin(), ids.end());
  }
  return out;
}

std::vector<int> build_stps(const QueryStructure& qs, const std::vector<std::uint64_t>& counts) {
  auto tporder = build_tporder(qs, counts);
  if (tporder.empty()) return {};
  std::vector<int> stps{tporder.front()};
  std::vector<bool> chosen(qs.tps.size(), false);
  chosen[tporder.front()] = true;
  auto connected = [&](int t) {
    for (int n : qs.got.neighbors(t))
      if (chosen[n]) return true;
    return false;
  };
  auto masters_done = [&](int t) {
    for (int m : master_patterns(qs, qs.gosn.group_of_pattern[t]))
      if (!chosen[m]) return false;
    return true;
  };
  // A slave group enters through a pattern holding every variable it shares with its
  // masters; later members must find all their bound variables in one earlier member.
  // Then, with minimal BitMats, a group that starts matching a master row completes it.
  auto well_placed = [&](int t) {
    int g = qs.gosn.group_of_pattern[t];
    if (g == 0) return true;
    auto vt = qs.tps[t].vars();
    std::set<std::string> bound;
    std::vector<int> members;
    for (int u : master_patterns(qs, g))
      for (const auto& v : qs.tps[u].vars()) bound.insert(v);
    for (int u : qs.gosn.groups[g].patterns)
      if (chosen[u]) {
        members.push_back(u);
        for (const auto& v : qs.tps[u].vars()) bound.insert(v);
      }
    std::vector<std::string> need;
    for (const auto& v : vt)
      if (bound.contains(v)) need.push_back(v);
    if (members.empty()) {
      // the entry must cover the group's whole interface
      for (int u : qs.gosn.groups[g].patterns)
        for (const auto& v : qs.tps[u].vars()) {
          bool shared = false;
          for (int m : master_patterns(qs, g)) {
            auto mv = qs.tps[m].vars();
            shared = shared || std::find(mv.begin(), mv.end(), v) != mv.end();
          }
          if (shared && std::find(vt.begin(), vt.end(), v) == vt.end()) return false;
        }
      return true;
    }
    for (int u : members) {
      auto vu = qs.tps[u].vars();
      if (std::all_of(need.begin(), need.end(), [&](const std::string& v) { return std::find(vu.begin(), vu.end(), v) != vu.end(); }))
        return true;
    }
    return false;
  };
  while (stps.size() < tporder.size()) {
    int pick = -1;
    for (int pass = 0; pass < 5 && pick < 0; ++pass) {
      for (int t : tporder) {
        if (chosen[t]) continue;
        bool ok = pass == 0   ? connected(t) && masters_done(t) && well_placed(t)
                  : pass == 1 ? connected(t) && masters_done(t)
                  : pass == 2 ? masters_done(t)
                  : pass == 3 ? connected(t)
                              : true;
        if (ok) {
          pick = t;
          break;
        }
      }
    }
    chosen[pick] = true;
    stps.push_back(pick);
  }
  return stps;
}

namespace {

constexpr int kNever = INT_MAX;

class Join {
 public:
  Join(const QueryStructure& qs, const std::vector<WorkingPattern>& wps, const std::vector<int>& stps,
       const std::vector<AttachedFilter>& residual, const Dictionary& dict, const JoinOptions& opts, JoinStats& stats)
      : qs_(qs), wps_(wps), stps_(stps), dict_(dict), opts_(opts), stats_(stats) {
    out_.header = qs.variables();
    for (std::size_t i = 0; i < out_.header.size(); ++i) var_index_[out_.header[i]] = static_cast<int>(i);
    cells_.assign(out_.header.size(), {0, -1});
    const std::size_t groups = qs.gosn.groups.size();
    dead_since_.assign(groups, kNever);
    failed_at_.assign(groups, kNever);
    for (const auto& wp : wps) {
      slots_.push_back({wp.row_var.empty() ? -1 : var_index_.at(wp.row_var), wp.col_var.empty() ? -1 : var_index_.at(wp.col_var)});
    }
    filters_ = residual;
    std::stable_sort(filters_.begin(), filters_.end(), [&](const AttachedFilter& a, const AttachedFilter& b) {
      return qs.gosn.depth(a.group) > qs.gosn.depth(b.group);
    });
    stats_.vmap_cells = cells_.size();

    std::vector<int> position(wps.size(), -1);
    for (std::size_t d = 0; d < stps.size(); ++d) position[stps[d]] = static_cast<int>(d);
    for (std::size_t d = 0; d < stps.size(); ++d)
      for (int m : master_patterns(qs, qs.gosn.group_of_pattern[stps[d]]))
        if (position[m] > static_cast<int>(d)) stats_.masters_first = false;
  }

  ResultSet run() {
    if (!stps_.empty()) step(0);
    return std::move(out_);
  }

 private:
  struct Cell {
    std::uint32_t value;
    int binder;  // stps depth that bound the cell, -1 when unbound
  };

  int group_at(int depth) const { return qs_.gosn.group_of_pattern[stps_[depth]]; }
  bool dead(int g) const { return dead_since_[g] != kNever; }

  // Value a bound cell contributes as a join constraint; 0 when unbound, NULL or bound by a dead group.
  std::uint32_t constraint(int var) const {
    if (var < 0) return 0;
    const auto& c = cells_[var];
    if (c.binder < 0 || c.value == 0 || dead(group_at(c.binder))) return 0;
    return c.value;
  }

  void bind(int var, std::uint32_t value, int depth, std::vector<int>& bound) {
    if (var < 0 || cells_[var].binder >= 0) return;
    cells_[var] = {value, depth};
    bound.push_back(var);
  }

  void unbind(std::vector<int>& bound) {
    for (int v : bound) cells_[v] = {0, -1};
    bound.clear();
  }

  void step(int depth) {
    ++stats_.calls;
    stats_.max_depth = std::max<std::size_t>(stats_.max_depth, depth);
    if (depth == static_cast<int>(stps_.size())) {
      emit();
      return;
    }
    const int t = stps_[depth];
    const int g = group_at(depth);
    const auto [rv, cv] = slots_[t];
    std::vector<int> bound;

    if (dead(g)) {
      bind(rv, 0, depth, bound);
      bind(cv, 0, depth, bound);
      step(depth + 1);
      unbind(bound);
      return;
    }

    bool matched = false;
    for_each_match(wps_[t], constraint(rv), constraint(cv), [&](std::uint32_t r, std::uint32_t c) {
      matched = true;
      bind(rv, r, depth, bound);
      bind(cv, c, depth, bound);
      step(depth + 1);
      unbind(bound);
    });
    if (matched || g == 0) return;

    std::vector<int> changed;
    if (opts_.unsafe_order) {
      if (failed_at_[g] == kNever) {
        failed_at_[g] = depth;
        changed.push_back(g);
      }
    } else {
      for (int s : qs_.gosn.closure(g))
        if (!dead(s)) {
          dead_since_[s] = depth;
          changed.push_back(s);
        }
    }
    bind(rv, 0, depth, bound);
    bind(cv, 0, depth, bound);
    step(depth + 1);
    unbind(bound);
    for (int s : changed) (opts_.unsafe_order ? failed_at_ : dead_since_)[s] = kNever;
  }

  void emit() {
    const std::size_t groups = qs_.gosn.groups.size();
    // A group that died after binding some of its variables must not leak them, whatever
    // the join order. The master-consistency check proper only runs when nulreqd.
    std::vector<bool> invalid(groups, false);
    for (std::size_t g = 0; g < groups; ++g) {
      int m = qs_.gosn.groups[g].master;
      bool gone = dead(static_cast<int>(g)) && !opts_.partial_rows;
      invalid[g] = gone || (opts_.nulreqd && (dead(static_cast<int>(g)) || failed_at_[g] != kNever || (m >= 0 && invalid[m])));
    }
    auto value_of = [&](int var) -> std::uint32_t {
      const auto& c = cells_[var];
      if (c.binder < 0 || c.value == 0 || invalid[group_at(c.binder)]) return 0;
      return c.value;
    };
    for (const auto& f : filters_) {
      if (invalid[f.group]) continue;
      auto lookup = [&](const std::string& name) -> const Term* {
        auto v = value_of(var_index_.at(name));
        return v ? &dict_.term_of_node(v) : nullptr;
      };
      if (eval_filter(f.expr, lookup) == Truth::True) continue;
      for (int s : qs_.gosn.closure(f.group)) invalid[s] = true;
      if (f.group != 0) stats_.filter_nullified = true;
    }
    if (!invalid.empty() && invalid[0]) {
      ++stats_.dropped;
      return;
    }
    Row row(cells_.size());
    for (std::size_t v = 0; v < cells_.size(); ++v) row[v] = value_of(static_cast<int>(v));
    out_.rows.push_back(std::move(row));
    ++stats_.emitted;
  }

  const QueryStructure& qs_;
  const std::vector<WorkingPattern>& wps_;
  const std::vector<int>& stps_;
  const Dictionary& dict_;
  JoinOptions opts_;
  JoinStats& stats_;
  std::map<std::string, int> var_index_;
  std::vector<std::pair<int, int>> slots_;
  std::vector<Cell> cells_;
  std::vector<int> dead_since_;
  std::vector<int> failed_at_;
  std::vector<AttachedFilter> filters_;
  ResultSet out_;
};

}  // namespace

ResultSet multi_way_join(const QueryStructure& qs, const std::vector<WorkingPattern>& wps, const std::vector<int>& stps,
                         const std::vector<AttachedFilter>& residual, const Dictionary& dict, const JoinOptions& opts,
                         JoinStats* stats) {
  JoinStats local;
  return Join(qs, wps, stps, residual, dict, opts, stats ? *stats : local).run();
}

QueryRun run_query(const Query& q, const TripleStore& store, const RunOptions& opts) {
  if (opts.unsafe_order && opts.prune) fail(ErrorKind::Contract, "unsafe join order requires pruning to be disabled");
  QueryRun run;
  run.pruned = opts.prune;
  run.pushed = push_filters(q.root);
  run.unf = to_unf(run.pushed);
  run.full.header = vars(q.root);

  bool any_nulreqd = false, any_filter_nulled = false;
  for (const auto& d : run.unf.disjuncts) {
    DisjunctRun dr;
    dr.qs = analyze(push_filters(d));
    if (!dr.qs.report.connected)
      fail(ErrorKind::Rejected, "disconnected query (Cartesian product) is only supported by the oracle evaluator");
    LoadOptions lo;
    lo.active_pruning = opts.prune;
    lo.load_time_filters = opts.prune;
    dr.loaded = load_patterns(dr.qs, store, lo, &dr.log);
    if (opts.prune) prune_triples(dr.qs, dr.loaded.patterns, &dr.log);

    std::vector<std::uint64_t> counts;
    for (const auto& w : dr.loaded.patterns) counts.push_back(w.count());
    if (opts.unsafe_order) {
      dr.stps.resize(dr.qs.tps.size());
      for (std::size_t i = 0; i < dr.stps.size(); ++i) dr.stps[i] = static_cast<int>(i);
    } else {
      dr.stps = build_stps(dr.qs, counts);
    }
    dr.nulreqd = opts.nullify == Toggle::On ||
                 (opts.nullify == Toggle::Auto && (dr.qs.report.nb_required || !opts.prune));
    JoinOptions jo{dr.nulreqd, opts.unsafe_order, opts.nullify == Toggle::Off};
    auto rows = multi_way_join(dr.qs, dr.loaded.patterns, dr.stps, dr.loaded.residual_filters, store.dict(), jo, &dr.stats);
    dr.rows = project(rows, run.full.header);
    any_nulreqd |= dr.nulreqd;
    any_filter_nulled |= dr.stats.filter_nullified;
    run.full.rows.insert(run.full.rows.end(), dr.rows.rows.begin(), dr.rows.rows.end());
    run.disjuncts.push_back(std::move(dr));
  }

  run.best_match_applied = opts.best_match == Toggle::On ||
                           (opts.best_match == Toggle::Auto && (any_nulreqd || any_filter_nulled || run.unf.rule3_used));
  if (run.best_match_applied) run.full = best_match(std::move(run.full));

  run.result = project(run.full, q.projection);
  if (q.distinct) {
    std::optional<ResultSet> fast;
    if (opts.distinct_bmm) fast = distinct_bmm(q, run, store.dict(), run.distinct);
    else run.distinct.reason = "disabled";
    if (fast) {
      run.result = std::move(*fast);
    } else {
      run.distinct.path = "naive";
      run.result = distinct_naive(run.result);
    }
  }
  return run;
}

ResultSet evaluate(const Query& q, const TripleStore& store, const RunOptions& opts) { return run_query(q, store, opts).result; }

}  // namespace bitopt
