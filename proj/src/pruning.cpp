#include "bitopt/pruning.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "bitopt/filter.hpp"

namespace bitopt {

namespace {

std::vector<int> by_count(std::vector<int> ids, const std::vector<std::uint64_t>& counts) {
  std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
    return counts[a] != counts[b] ? counts[a] < counts[b] : a < b;
  });
  return ids;
}

SemiJoinStep step(const QueryStructure& qs, int target, int source, bool transfer = false) {
  return {target, source, shared_vars(qs.tps[target], qs.tps[source]), transfer};
}

bool same_or_master(const GoSN& g, int master_group, int group) {
  return master_group == group || g.masters(master_group, group);
}

std::vector<std::uint64_t> counts_of(const std::vector<WorkingPattern>& wps) {
  std::vector<std::uint64_t> c;
  for (const auto& w : wps) c.push_back(w.count());
  return c;
}

void run(std::vector<WorkingPattern>& wps, const std::vector<SemiJoinStep>& steps, PruneLog* log) {
  for (const auto& s : steps) {
    semi_join(wps[s.target], wps[s.source]);
    if (log) log->executed.push_back(s);
  }
}

// Full reducer over a slave group plus scratch copies of its masters' patterns. Needed
// when the group's patterns only meet through a master: pairwise transfer from the
// master cannot tell that the pieces must agree on one master binding.
void reduce_split_group(const QueryStructure& qs, int group, std::vector<WorkingPattern>& wps, PruneLog* log) {
  const auto& grp = qs.gosn.groups[group];
  if (grp.master < 0 || qs.got.induced(grp.patterns).connected()) return;
  std::vector<int> ids = grp.patterns;
  for (int a = grp.master; a >= 0; a = qs.gosn.groups[a].master)
    ids.insert(ids.end(), qs.gosn.groups[a].patterns.begin(), qs.gosn.groups[a].patterns.end());
  GoT sub = sharing_graph(qs.tps, ids);
  auto acyc = is_acyclic(sub);
  if (!acyc.acyclic) return;

  std::vector<WorkingPattern> local;
  for (int t : ids) local.push_back(wps[t]);
  std::vector<std::pair<int, int>> tree;  // (parent, leaf) in local indices
  std::set<int> remaining;
  for (int i = 0; i < sub.nodes; ++i) remaining.insert(i);
  for (int leaf : acyc.order) {
    remaining.erase(leaf);
    std::vector<int> nbrs, covering;
    std::set<std::string> shared;
    for (int n : sub.neighbors(leaf)) {
      if (!remaining.contains(n)) continue;
      nbrs.push_back(n);
      for (const auto& v : sub.edge(leaf, n)->label) shared.insert(v);
    }
    for (int n : nbrs)
      if (sub.edge(leaf, n)->label.size() == shared.size()) covering.push_back(n);
    if (covering.empty()) covering = nbrs;
    if (covering.empty()) continue;
    std::vector<std::uint64_t> counts;
    for (const auto& w : local) counts.push_back(w.count());
    tree.emplace_back(by_count(covering, counts).front(), leaf);
  }
  auto apply = [&](int target, int source) {
    semi_join(local[target], local[source]);
    bool own = target < static_cast<int>(grp.patterns.size());
    if (log && own) log->executed.push_back(step(qs, ids[target], ids[source], ids[source] != ids[target] && source >= static_cast<int>(grp.patterns.size())));
  };
  for (auto [parent, leaf] : tree) apply(parent, leaf);
  for (auto it = tree.rbegin(); it != tree.rend(); ++it) apply(it->second, it->first);
  for (std::size_t i = 0; i < grp.patterns.size(); ++i) wps[ids[i]] = std::move(local[i]);
}

}  // namespace

std::vector<int> order_supernodes(const GoSN& gosn) {
  std::vector<int> order(gosn.groups.size());
  std::iota(order.begin(), order.end(), 0);
  return order;
}

GroupSchedule group_schedule(const QueryStructure& qs, int group, const std::vector<std::uint64_t>& counts) {
  GroupSchedule gs;
  gs.group = group;
  const auto& grp = qs.gosn.groups[group];
  std::set<int> remaining(grp.patterns.begin(), grp.patterns.end());
  std::vector<int> master_patterns;
  if (grp.master >= 0) master_patterns = qs.gosn.groups[grp.master].patterns;

  auto live_edges = [&](int t) {
    std::vector<const std::vector<std::string>*> labels;
    for (const auto& e : qs.got.edges) {
      int other = e.a == t ? e.b : e.b == t ? e.a : -1;
      if (other >= 0 && remaining.contains(other)) labels.push_back(&e.label);
    }
    return labels;
  };

  while (!remaining.empty()) {
    std::vector<int> leaves;
    for (int t : remaining) {
      auto labels = live_edges(t);
      if (labels.size() <= 1 || equivalence_classes(labels) <= 1) leaves.push_back(t);
    }
    if (leaves.empty()) leaves.assign(remaining.begin(), remaining.end());
    int t = by_count(leaves, counts).front();

    for (int m : master_patterns)
      if (qs.got.edge(t, m)) gs.bottom_up.push_back(step(qs, t, m, true));

    // The parent must share every variable the leaf shares with the rest of the group.
    std::vector<int> nbrs, covering;
    std::set<std::string> shared;
    for (int n : qs.got.neighbors(t)) {
      if (n == t || !remaining.contains(n)) continue;
      nbrs.push_back(n);
      for (const auto& v : qs.got.edge(t, n)->label) shared.insert(v);
    }
    for (int n : nbrs)
      if (qs.got.edge(t, n)->label.size() == shared.size()) covering.push_back(n);
    if (covering.empty()) covering = nbrs;
    if (!covering.empty()) gs.bottom_up.push_back(step(qs, by_count(covering, counts).front(), t));
    remaining.erase(t);
  }

  for (auto it = gs.bottom_up.rbegin(); it != gs.bottom_up.rend(); ++it)
    if (!it->master_transfer) gs.top_down.push_back(step(qs, it->source, it->target));
  return gs;
}

std::vector<SemiJoinStep> greedy_order(const QueryStructure& qs, const std::vector<int>& groups,
                                       const std::vector<std::uint64_t>& counts) {
  std::vector<SemiJoinStep> out;
  std::vector<int> processed;
  for (int g : groups) {
    for (int t : by_count(qs.gosn.groups[g].patterns, counts)) {
      for (int u : processed)
        if (qs.got.edge(t, u))
          out.push_back(step(qs, t, u, qs.gosn.group_of_pattern[u] != qs.gosn.group_of_pattern[t]));
      processed.push_back(t);
    }
  }
  return out;
}

PruneSchedule build_schedule(const QueryStructure& qs, const std::vector<std::uint64_t>& counts) {
  PruneSchedule s;
  s.regime = qs.report.regime;
  s.sn_order = order_supernodes(qs.gosn);
  if (s.regime == PruneRegime::Greedy) {
    s.greedy = greedy_order(qs, s.sn_order, counts);
    return s;
  }
  std::size_t first = 0;
  if (s.regime == PruneRegime::AbsCycles && !s.sn_order.empty()) {
    s.greedy = greedy_order(qs, {s.sn_order.front()}, counts);
    first = 1;
  }
  for (std::size_t i = first; i < s.sn_order.size(); ++i) s.groups.push_back(group_schedule(qs, s.sn_order[i], counts));
  return s;
}

LoadedPatterns load_patterns(const QueryStructure& qs, const TripleStore& store, const LoadOptions& opts, PruneLog* log) {
  LoadedPatterns out;
  const int n = static_cast<int>(qs.tps.size());
  for (int i = 0; i < n; ++i) {
    out.patterns.push_back(load_working(store, qs.tps[i]));
    out.patterns.back().group = qs.gosn.group_of_pattern[i];
  }

  // Orientation of two-variable patterns follows the variable they are first joined on.
  auto initial = counts_of(out.patterns);
  auto plan = build_schedule(qs, initial);
  std::vector<SemiJoinStep> flat = plan.greedy;
  for (const auto& g : plan.groups) flat.insert(flat.end(), g.bottom_up.begin(), g.bottom_up.end());
  std::vector<bool> oriented(n, false);
  for (const auto& st : flat) {
    for (int t : {st.target, st.source}) {
      if (oriented[t] || st.vars.size() != 1) continue;
      oriented[t] = true;
      const auto& tp = qs.tps[t];
      if (tp.s.is_var && tp.o.is_var && tp.o.var == st.vars.front() && tp.s.var != tp.o.var) {
        out.patterns[t] = load_working(store, tp, st.vars.front());
        out.patterns[t].group = qs.gosn.group_of_pattern[t];
      }
    }
  }

  for (const auto& f : qs.filters) {
    if (!opts.load_time_filters) {
      out.residual_filters.push_back(f);
      continue;
    }
    auto split = classify_loadtime_filters(f.expr);
    std::vector<FilterExpr> residual = split.residual;
    for (const auto& c : split.load_time) {
      const std::string v = c.vars().front();
      bool applied = false;
      for (int p : qs.gosn.groups[f.group].patterns) {
        if (!out.patterns[p].has_var(v)) continue;
        apply_filter(out.patterns[p], c, store.dict());
        applied = true;
        if (log) log->load_filters.emplace_back(p, c);
      }
      if (!applied) residual.push_back(c);
    }
    if (auto r = conjoin(residual)) out.residual_filters.push_back({*r, f.group});
  }

  std::vector<int> order;
  for (int g : order_supernodes(qs.gosn)) {
    auto ids = by_count(qs.gosn.groups[g].patterns, counts_of(out.patterns));
    order.insert(order.end(), ids.begin(), ids.end());
  }
  if (log) log->load_order = order;
  if (!opts.active_pruning) return out;

  std::vector<int> loaded;
  for (int t : order) {
    int gt = qs.gosn.group_of_pattern[t];
    for (int u : loaded) {
      if (!same_or_master(qs.gosn, qs.gosn.group_of_pattern[u], gt)) continue;
      auto st = step(qs, t, u, qs.gosn.group_of_pattern[u] != gt);
      if (st.vars.empty()) continue;
      semi_join(out.patterns[t], out.patterns[u]);
      if (log) log->active.push_back(st);
    }
    loaded.push_back(t);
  }
  return out;
}

void prune_triples(const QueryStructure& qs, std::vector<WorkingPattern>& wps, PruneLog* log) {
  auto order = order_supernodes(qs.gosn);
  const auto regime = qs.report.regime;
  if (regime == PruneRegime::Greedy) {
    run(wps, greedy_order(qs, order, counts_of(wps)), log);
    return;
  }
  std::size_t first = 0;
  if (regime == PruneRegime::AbsCycles && !order.empty()) {
    run(wps, greedy_order(qs, {order.front()}, counts_of(wps)), log);
    first = 1;
  }
  for (std::size_t i = first; i < order.size(); ++i) {
    auto gs = group_schedule(qs, order[i], counts_of(wps));
    run(wps, gs.bottom_up, log);
    run(wps, gs.top_down, log);
    reduce_split_group(qs, order[i], wps, log);
  }
}

std::string to_string(const SemiJoinStep& s, const std::vector<TriplePattern>& tps) {
  std::string vars;
  for (const auto& v : s.vars) vars += (vars.empty() ? "?" : ", ?") + v;
  return "T" + std::to_string(tps[s.target].index + 1) + " ⋉ T" + std::to_string(tps[s.source].index + 1) + " over {" +
         vars + "}";
}

}  // namespace bitopt
