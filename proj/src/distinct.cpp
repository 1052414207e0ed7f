#include "bitopt/distinct.hpp"

#include <algorithm>
#include <map>

#include "bitopt/error.hpp"

namespace bitopt {

namespace {

using Pairs = std::vector<std::pair<std::uint32_t, std::uint32_t>>;
using Binding = std::map<std::string, std::uint32_t>;

WorkingPattern single_row(std::string var, std::uint32_t width, const std::vector<std::uint32_t>& positions) {
  WorkingPattern wp;
  wp.col_var = std::move(var);
  Pairs pairs;
  for (auto p : positions) pairs.emplace_back(1, p);
  wp.bm = BitMat::from_pairs(BitMatKind::Derived, 0, 1, width, std::move(pairs));
  return wp;
}

WorkingPattern constant_node(bool any) {
  WorkingPattern wp;
  Pairs pairs;
  if (any) pairs.emplace_back(1, 1);
  wp.bm = BitMat::from_pairs(BitMatKind::Derived, 0, 1, 1, std::move(pairs));
  return wp;
}

WorkingPattern normalized(const WorkingPattern& wp) {
  if (!wp.diagonal()) return wp;
  std::vector<std::uint32_t> diag;
  for (auto r : wp.bm.nonempty_rows().positions())
    if (wp.bm.test(r, r)) diag.push_back(r);
  auto out = single_row(wp.col_var, wp.bm.cols(), diag);
  out.tp = wp.tp;
  out.group = wp.group;
  return out;
}

bool holds(const WorkingPattern& wp, const std::string& v) { return wp.has_var(v); }

std::string other_var(const WorkingPattern& wp, const std::string& v) {
  if (wp.row_var.empty()) return "";
  return wp.row_var == v ? wp.col_var : wp.row_var;
}

// The node's matrix with `v` on `dim`; single-variable rows become columns when needed.
BitMat oriented(const WorkingPattern& wp, const std::string& v, Dim dim) {
  bool v_on_row = !wp.row_var.empty() && wp.row_var == v;
  bool want_row = dim == Dim::Row;
  return v_on_row == want_row ? wp.bm : wp.bm.transpose();
}

WorkingPattern contract(const WorkingPattern& a, const WorkingPattern& b, const std::string& v) {
  BitMat product = bmm(oriented(a, v, Dim::Column), oriented(b, v, Dim::Row));
  std::string x = other_var(a, v), y = other_var(b, v);
  WorkingPattern out;
  if (!x.empty() && !y.empty() && x != y) {
    out.row_var = x;
    out.col_var = y;
    out.bm = std::move(product);
  } else if (!x.empty() && x == y) {
    std::vector<std::uint32_t> diag;
    for (auto r : product.nonempty_rows().positions())
      if (product.test(r, r)) diag.push_back(r);
    out = single_row(x, product.cols(), diag);
  } else if (!x.empty()) {
    out = single_row(x, product.rows(), product.fold(Dim::Row).positions());
  } else if (!y.empty()) {
    out = single_row(y, product.cols(), product.fold(Dim::Column).positions());
  } else {
    out = constant_node(product.triple_count() != 0);
  }
  out.group = a.group;
  return out;
}

WorkingPattern fold_away(const WorkingPattern& wp, const std::string& v) {
  std::string keep = other_var(wp, v);
  if (keep.empty()) return constant_node(wp.count() != 0);
  Dim dim = wp.row_var == keep ? Dim::Row : Dim::Column;
  auto out = single_row(keep, wp.bm.extent(dim), wp.bm.fold(dim).positions());
  out.group = wp.group;
  return out;
}

std::vector<std::string> shared(const WorkingPattern& a, const WorkingPattern& b) {
  std::vector<std::string> out;
  for (const auto& v : a.vars())
    if (holds(b, v)) out.push_back(v);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> kept_vars(const WorkingPattern& wp, const std::set<std::string>& keep) {
  std::vector<std::string> out;
  for (const auto& v : wp.vars())
    if (keep.contains(v)) out.push_back(v);
  return out;
}

std::size_t occurrences(const Mcs& mcs, const std::string& v) {
  std::size_t n = 0;
  for (const auto& node : mcs.nodes) n += holds(node.wp, v);
  return n;
}

}  // namespace

std::vector<std::string> Mcs::vars() const {
  std::set<std::string> all;
  for (const auto& n : nodes)
    for (const auto& v : n.wp.vars()) all.insert(v);
  return {all.begin(), all.end()};
}

std::vector<GotEdge> Mcs::edges() const {
  std::vector<GotEdge> out;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      auto label = shared(nodes[i].wp, nodes[j].wp);
      if (!label.empty()) out.push_back({static_cast<int>(i), static_cast<int>(j), label});
    }
  return out;
}

Mcs mcs_from_group(const QueryStructure& qs, const std::vector<WorkingPattern>& wps, int group) {
  Mcs mcs;
  mcs.group = group;
  for (int p : qs.gosn.groups[group].patterns)
    mcs.nodes.push_back({"T" + std::to_string(qs.tps[p].index + 1), normalized(wps[p])});
  return mcs;
}

Mcs carve_mcs(Mcs mcs, const std::set<std::string>& keep, std::vector<std::string>* steps) {
  bool changed = true;
  while (changed && mcs.nodes.size() > 1) {
    changed = false;
    auto edges = mcs.edges();
    for (std::size_t i = 0; i < mcs.nodes.size() && !changed; ++i) {
      std::vector<const std::vector<std::string>*> labels;
      const GotEdge* widest = nullptr;
      for (const auto& e : edges) {
        if (e.a != static_cast<int>(i) && e.b != static_cast<int>(i)) continue;
        labels.push_back(&e.label);
        if (!widest || e.label.size() > widest->label.size()) widest = &e;
      }
      if (!widest || equivalence_classes(labels) > 1) continue;
      const auto& witness = mcs.nodes[widest->a == static_cast<int>(i) ? widest->b : widest->a].wp;
      auto mine = kept_vars(mcs.nodes[i].wp, keep);
      if (!std::all_of(mine.begin(), mine.end(), [&](const std::string& v) { return holds(witness, v); })) continue;
      if (steps) steps->push_back("carve drop " + mcs.nodes[i].name);
      mcs.nodes.erase(mcs.nodes.begin() + static_cast<std::ptrdiff_t>(i));
      changed = true;
    }
  }
  return mcs;
}

Mcs shrink_mcs(Mcs mcs, const std::set<std::string>& keep, DistinctTrace* trace) {
  auto note = [&](std::string s) {
    if (trace) trace->steps.push_back(std::move(s));
  };
  std::size_t last = mcs.nodes.size();
  int products = 0;
  std::vector<std::size_t>* counts = trace ? &trace->node_counts[mcs.group] : nullptr;
  if (counts) counts->assign(1, last);
  for (bool changed = true; changed;) {
    changed = false;

    for (auto& node : mcs.nodes) {
      for (const auto& v : node.wp.vars()) {
        if (keep.contains(v) || occurrences(mcs, v) != 1) continue;
        node.wp = fold_away(node.wp, v);
        note("fold ?" + v + " in " + node.name);
        changed = true;
      }
    }

    for (std::size_t i = 0; i < mcs.nodes.size() && mcs.nodes.size() > 1; ++i) {
      const auto& wp = mcs.nodes[i].wp;
      if (!wp.col_var.empty() || wp.count() == 0) continue;
      note("drop satisfied " + mcs.nodes[i].name);
      mcs.nodes.erase(mcs.nodes.begin() + static_cast<std::ptrdiff_t>(i));
      changed = true;
      break;
    }

    for (const auto& v : mcs.vars()) {
      if (keep.contains(v) || occurrences(mcs, v) != 2) continue;
      std::vector<std::size_t> ends;
      for (std::size_t i = 0; i < mcs.nodes.size(); ++i)
        if (holds(mcs.nodes[i].wp, v)) ends.push_back(i);
      McsNode product{"B" + std::to_string(++products), contract(mcs.nodes[ends[0]].wp, mcs.nodes[ends[1]].wp, v)};
      note("bmm " + mcs.nodes[ends[0]].name + " x " + mcs.nodes[ends[1]].name + " over ?" + v + " -> " + product.name);
      mcs.nodes.erase(mcs.nodes.begin() + static_cast<std::ptrdiff_t>(ends[1]));
      mcs.nodes[ends[0]] = std::move(product);
      changed = true;
      break;
    }

    if (mcs.nodes.size() > last) fail(ErrorKind::Contract, "shrink_mcs: node count increased");
    if (changed && counts) counts->push_back(mcs.nodes.size());
    last = mcs.nodes.size();
  }
  return mcs;
}

ResultSet distinct_naive(const ResultSet& projected) { return best_match(projected); }

namespace {

class TreeEval {
 public:
  TreeEval(const GoSN& gosn, const std::map<int, Mcs>& groups) : gosn_(gosn), groups_(groups) {}

  std::vector<Binding> eval(int g, const Binding& in) const {
    std::vector<Binding> matches;
    const auto& nodes = groups_.at(g).nodes;
    std::vector<bool> used(nodes.size(), false);
    join(nodes, used, 0, in, matches);

    std::vector<Binding> out;
    for (const auto& b : matches) {
      std::vector<Binding> acc{b};
      for (int s : gosn_.groups[g].slaves) {
        if (!groups_.contains(s)) continue;
        std::vector<Binding> next;
        for (const auto& partial : acc) {
          auto ext = eval(s, partial);
          if (ext.empty()) next.push_back(partial);
          else next.insert(next.end(), ext.begin(), ext.end());
        }
        acc = std::move(next);
      }
      out.insert(out.end(), acc.begin(), acc.end());
    }
    return out;
  }

 private:
  // Next node: the first unused one sharing a bound variable, else the first unused.
  static std::size_t pick(const std::vector<McsNode>& nodes, const std::vector<bool>& used, const Binding& b) {
    std::size_t fallback = nodes.size();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (used[i]) continue;
      if (fallback == nodes.size()) fallback = i;
      for (const auto& v : nodes[i].wp.vars())
        if (b.contains(v)) return i;
    }
    return fallback;
  }

  static void join(const std::vector<McsNode>& nodes, std::vector<bool>& used, std::size_t done, const Binding& b,
                   std::vector<Binding>& out) {
    if (done == nodes.size()) {
      out.push_back(b);
      return;
    }
    std::size_t i = pick(nodes, used, b);
    const auto& wp = nodes[i].wp;
    auto fixed = [&](const std::string& v) -> std::uint32_t {
      if (v.empty()) return 0;
      auto it = b.find(v);
      return it == b.end() ? 0 : it->second;
    };
    used[i] = true;
    for_each_match(wp, fixed(wp.row_var), fixed(wp.col_var), [&](std::uint32_t r, std::uint32_t c) {
      Binding next = b;
      if (!wp.row_var.empty()) next[wp.row_var] = r;
      if (!wp.col_var.empty()) next[wp.col_var] = c;
      join(nodes, used, done + 1, next, out);
    });
    used[i] = false;
  }

  const GoSN& gosn_;
  const std::map<int, Mcs>& groups_;
};

std::vector<std::string> group_vars(const QueryStructure& qs, int g) {
  std::set<std::string> out;
  for (int p : qs.gosn.groups[g].patterns)
    for (const auto& v : qs.tps[p].vars()) out.insert(v);
  return {out.begin(), out.end()};
}

}  // namespace

std::optional<ResultSet> distinct_bmm(const Query& q, const QueryRun& run, const Dictionary& dict, DistinctTrace& trace) {
  (void)dict;
  auto decline = [&](const char* why) -> std::optional<ResultSet> {
    trace.reason = why;
    return std::nullopt;
  };
  if (run.disjuncts.size() != 1 || run.unf.rule3_used) return decline("union");
  const auto& dr = run.disjuncts.front();
  const auto& qs = dr.qs;
  if (!qs.filters.empty() || has_kind(qs.root, NodeKind::Filter)) return decline("filter");
  if (!qs.report.got_acyclic) return decline("cyclic");
  if (!run.pruned) return decline("unpruned");

  std::set<std::string> distinct(q.projection.begin(), q.projection.end());
  const int ngroups = static_cast<int>(qs.gosn.groups.size());
  auto marked = [&](int g) {
    for (const auto& v : group_vars(qs, g))
      if (distinct.contains(v)) return true;
    return false;
  };
  if (ngroups > 1 && !marked(0)) return decline("distinct variables only in slaves");

  std::set<int> kept;
  for (int g = 0; g < ngroups; ++g) {
    if (!marked(g)) continue;
    for (int m = g; m >= 0; m = qs.gosn.groups[m].master) kept.insert(m);
  }
  kept.insert(0);
  trace.path = ngroups > 1 ? "bmm-opt" : "bmm";
  for (int g = 0; g < ngroups; ++g)
    if (!kept.contains(g)) trace.steps.push_back("skip group " + std::to_string(g));

  std::map<int, Mcs> groups;
  for (int g : kept) {
    std::set<std::string> keep = distinct;
    for (int h : kept)
      if (h != g)
        for (const auto& v : group_vars(qs, h)) keep.insert(v);
    auto mcs = mcs_from_group(qs, dr.loaded.patterns, g);
    if (g == 0) mcs = carve_mcs(std::move(mcs), keep, &trace.steps);
    groups[g] = shrink_mcs(std::move(mcs), keep, &trace);
  }

  ResultSet out;
  out.header = q.projection;
  for (const auto& b : TreeEval(qs.gosn, groups).eval(0, {})) {
    Row r;
    for (const auto& v : q.projection) {
      auto it = b.find(v);
      r.push_back(it == b.end() ? 0 : it->second);
    }
    out.rows.push_back(std::move(r));
  }
  return best_match(std::move(out));
}

}  // namespace bitopt
