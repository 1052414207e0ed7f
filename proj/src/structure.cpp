#include "bitopt/structure.hpp"

#include <algorithm>
#include <functional>
#include <iterator>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <unordered_set>

#include "bitopt/error.hpp"

namespace bitopt {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  void unite(int a, int b) { parent[find(a)] = find(b); }
  int components() {
    int c = 0;
    for (std::size_t i = 0; i < parent.size(); ++i) c += find(static_cast<int>(i)) == static_cast<int>(i);
    return c;
  }
};

bool subset(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

std::vector<std::string> shared_vars(const TriplePattern& a, const TriplePattern& b) {
  auto va = a.vars(), vb = b.vars();
  std::sort(va.begin(), va.end());
  std::sort(vb.begin(), vb.end());
  std::vector<std::string> out;
  std::set_intersection(va.begin(), va.end(), vb.begin(), vb.end(), std::back_inserter(out));
  return out;
}

bool GoSN::masters(int master, int slave) const {
  for (int g = groups[slave].master; g >= 0; g = groups[g].master)
    if (g == master) return true;
  return false;
}

std::vector<int> GoSN::closure(int g) const {
  std::vector<int> out{g};
  for (std::size_t i = 0; i < out.size(); ++i)
    for (int s : groups[out[i]].slaves) out.push_back(s);
  return out;
}

int GoSN::depth(int g) const {
  int d = 0;
  for (int m = groups[g].master; m >= 0; m = groups[m].master) ++d;
  return d;
}

std::vector<int> GoT::incident(int node) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (edges[i].a == node || edges[i].b == node) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> GoT::neighbors(int node) const {
  std::vector<int> out;
  for (const auto& e : edges) {
    if (e.a == node) out.push_back(e.b);
    else if (e.b == node) out.push_back(e.a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

const GotEdge* GoT::edge(int a, int b) const {
  for (const auto& e : edges)
    if ((e.a == a && e.b == b) || (e.a == b && e.b == a)) return &e;
  return nullptr;
}

GoT GoT::induced(const std::vector<int>& keep) const {
  std::map<int, int> local;
  for (std::size_t i = 0; i < keep.size(); ++i) local[keep[i]] = static_cast<int>(i);
  GoT g;
  g.nodes = static_cast<int>(keep.size());
  for (const auto& e : edges) {
    auto a = local.find(e.a), b = local.find(e.b);
    if (a != local.end() && b != local.end()) g.edges.push_back({a->second, b->second, e.label});
  }
  return g;
}

bool GoT::connected() const {
  if (nodes <= 1) return true;
  UnionFind uf(static_cast<std::size_t>(nodes));
  for (const auto& e : edges) uf.unite(e.a, e.b);
  return uf.components() == 1;
}

int equivalence_classes(const std::vector<const std::vector<std::string>*>& labels) {
  UnionFind uf(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t j = i + 1; j < labels.size(); ++j)
      if (subset(*labels[i], *labels[j]) || subset(*labels[j], *labels[i])) uf.unite(static_cast<int>(i), static_cast<int>(j));
  return uf.components();
}

int equivalence_classes(const GoT& got, const std::vector<int>& edge_ids) {
  std::vector<const std::vector<std::string>*> labels;
  for (int e : edge_ids) labels.push_back(&got.edges[e].label);
  return equivalence_classes(labels);
}

Acyclicity is_acyclic(const GoT& got) {
  const int n = got.nodes;
  if (n > 62) fail(ErrorKind::Unsupported, "acyclicity test supports at most 62 triple patterns");
  using Mask = std::uint64_t;
  auto is_leaf = [&](int v, Mask alive) {
    std::vector<const std::vector<std::string>*> labels;
    for (const auto& e : got.edges) {
      int other = e.a == v ? e.b : e.b == v ? e.a : -1;
      if (other >= 0 && (alive >> other & 1)) labels.push_back(&e.label);
    }
    return labels.size() <= 1 || equivalence_classes(labels) <= 1;
  };

  Acyclicity result;
  std::unordered_set<Mask> dead;
  std::function<bool(Mask)> search = [&](Mask alive) -> bool {
    if (alive == 0) return true;
    if (dead.contains(alive)) return false;
    for (int v = 0; v < n; ++v) {
      if (!(alive >> v & 1) || !is_leaf(v, alive)) continue;
      result.order.push_back(v);
      if (search(alive & ~(Mask{1} << v))) return true;
      result.order.pop_back();
    }
    dead.insert(alive);
    return false;
  };
  Mask all = n == 64 ? ~Mask{0} : (Mask{1} << n) - 1;
  result.acyclic = search(all);
  return result;
}

const char* to_string(PruneRegime r) {
  switch (r) {
    case PruneRegime::Acyclic: return "acyclic";
    case PruneRegime::AbsCycles: return "abs-cycles";
    case PruneRegime::Greedy: return "greedy";
  }
  return "?";
}

GoSN build_gosn(const NodePtr& root) {
  GoSN g;
  std::map<const PatternNode*, int> sn_of;
  int next_pattern = 0;
  for (const auto& b : bgps(root)) {
    Supernode sn;
    sn.id = static_cast<int>(g.supernodes.size());
    for (std::size_t i = 0; i < b->patterns.size(); ++i) sn.patterns.push_back(next_pattern++);
    sn_of[b.get()] = sn.id;
    g.supernodes.push_back(std::move(sn));
  }
  const int n = static_cast<int>(g.supernodes.size());

  std::function<void(const NodePtr&)> walk = [&](const NodePtr& node) {
    if (node->kind == NodeKind::Bgp) return;
    if (node->kind == NodeKind::Union) fail(ErrorKind::Contract, "GoSN needs a UNION-free pattern");
    walk(node->left);
    if (node->kind == NodeKind::Filter) return;
    walk(node->right);
    int l = sn_of.at(leftmost_bgp(node->left).get());
    int r = sn_of.at(leftmost_bgp(node->right).get());
    if (node->kind == NodeKind::LeftJoin) g.uni.emplace_back(l, r);
    else g.bi.emplace_back(std::min(l, r), std::max(l, r));
  };
  walk(root);

  // A supernode is absolute unless a path through some unidirectional edge reaches it.
  std::vector<bool> reached(n, false);
  std::vector<int> stack;
  for (auto [m, s] : g.uni) stack.push_back(s);
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    if (reached[v]) continue;
    reached[v] = true;
    for (auto [m, s] : g.uni)
      if (m == v) stack.push_back(s);
    for (auto [a, b] : g.bi) {
      if (a == v) stack.push_back(b);
      if (b == v) stack.push_back(a);
    }
  }
  g.absolute.resize(n);
  for (int i = 0; i < n; ++i) g.absolute[i] = !reached[i];

  UnionFind peers(static_cast<std::size_t>(n));
  for (auto [a, b] : g.bi) peers.unite(a, b);
  int first_abs = -1;
  for (int i = 0; i < n; ++i) {
    if (!g.absolute[i]) continue;
    if (first_abs < 0) first_abs = i;
    else peers.unite(i, first_abs);
  }

  // Raw group ids keyed by union-find root, then master links between them.
  std::map<int, int> raw_id;
  std::vector<std::vector<int>> members;
  std::vector<int> raw_of_sn(n);
  for (int i = 0; i < n; ++i) {
    auto [it, fresh] = raw_id.emplace(peers.find(i), static_cast<int>(members.size()));
    if (fresh) members.emplace_back();
    members[it->second].push_back(i);
    raw_of_sn[i] = it->second;
  }
  const int k = static_cast<int>(members.size());
  std::vector<int> raw_master(k, -1);
  for (auto [m, s] : g.uni) {
    int gm = raw_of_sn[m], gs = raw_of_sn[s];
    if (gm == gs) fail(ErrorKind::Contract, "unidirectional edge inside a peer group");
    if (raw_master[gs] >= 0 && raw_master[gs] != gm)
      fail(ErrorKind::Rejected, "supernode has more than one master; query is not well-designed");
    raw_master[gs] = gm;
  }

  // sn-order: SN_abs first, then masters before slaves, ties by smallest supernode id.
  std::vector<int> order;
  using Item = std::pair<int, int>;  // (min supernode id, raw group)
  std::priority_queue<Item, std::vector<Item>, std::greater<>> ready;
  for (int r = 0; r < k; ++r)
    if (raw_master[r] < 0) ready.emplace(members[r].front(), r);
  while (!ready.empty()) {
    int r = ready.top().second;
    ready.pop();
    order.push_back(r);
    for (int s = 0; s < k; ++s)
      if (raw_master[s] == r) ready.emplace(members[s].front(), s);
  }
  if (static_cast<int>(order.size()) != k) fail(ErrorKind::Contract, "cyclic master relation between supernodes");
  if (k > 0 && !g.absolute[members[order.front()].front()])
    fail(ErrorKind::Contract, "first supernode group is not absolute");

  std::vector<int> final_of_raw(k);
  for (int i = 0; i < k; ++i) final_of_raw[order[i]] = i;
  g.groups.resize(k);
  g.group_of_sn.resize(n);
  for (int i = 0; i < k; ++i) {
    int r = order[i];
    auto& grp = g.groups[i];
    grp.supernodes = members[r];
    grp.master = raw_master[r] < 0 ? -1 : final_of_raw[raw_master[r]];
    for (int sn : grp.supernodes) {
      g.group_of_sn[sn] = i;
      for (int p : g.supernodes[sn].patterns) grp.patterns.push_back(p);
    }
    std::sort(grp.patterns.begin(), grp.patterns.end());
  }
  for (int i = 0; i < k; ++i)
    if (g.groups[i].master >= 0) g.groups[g.groups[i].master].slaves.push_back(i);
  for (std::size_t i = 1; i < g.groups.size(); ++i)
    if (g.groups[i].master < 0) fail(ErrorKind::Contract, "more than one absolute group");
  g.group_of_pattern.resize(next_pattern);
  for (const auto& sn : g.supernodes)
    for (int p : sn.patterns) g.group_of_pattern[p] = g.group_of_sn[sn.id];
  return g;
}

GoT build_got(const GoSN& gosn, const std::vector<TriplePattern>& tps) {
  GoT got;
  got.nodes = static_cast<int>(tps.size());
  for (int i = 0; i < got.nodes; ++i) {
    for (int j = i + 1; j < got.nodes; ++j) {
      int gi = gosn.group_of_pattern[i], gj = gosn.group_of_pattern[j];
      bool related = gi == gj || gosn.groups[gi].master == gj || gosn.groups[gj].master == gi;
      if (!related) continue;
      auto label = shared_vars(tps[i], tps[j]);
      if (!label.empty()) got.edges.push_back({i, j, std::move(label)});
    }
  }
  return got;
}

GoT sharing_graph(const std::vector<TriplePattern>& tps, const std::vector<int>& ids) {
  GoT g;
  g.nodes = static_cast<int>(ids.size());
  for (int i = 0; i < g.nodes; ++i)
    for (int j = i + 1; j < g.nodes; ++j)
      if (auto label = shared_vars(tps[ids[i]], tps[ids[j]]); !label.empty()) g.edges.push_back({i, j, label});
  return g;
}

StructureReport classify(const GoSN& gosn, const GoT& got, const std::vector<TriplePattern>& tps) {
  StructureReport r;
  r.connected = got.connected();
  r.well_designed = true;
  r.got_acyclic = is_acyclic(got).acyclic;
  r.slaves_acyclic = true;
  r.one_equiv_class_per_pair = true;
  r.slaves_connected = true;
  r.interfaces_covered = true;
  for (std::size_t g = 0; g < gosn.groups.size(); ++g) {
    bool acyclic = is_acyclic(got.induced(gosn.groups[g].patterns)).acyclic;
    if (g == 0) {
      r.abs_acyclic = acyclic;
      continue;
    }
    if (!acyclic) r.slaves_acyclic = false;
    if (!got.induced(gosn.groups[g].patterns).connected()) r.slaves_connected = false;
    int m = gosn.groups[g].master;
    // A cycle closed through the master chain can vanish from the whole-graph test:
    // siblings and non-adjacent ancestors have no GoT edges, so a pattern they cover is
    // removed as a leaf first.
    auto chain = gosn.groups[g].patterns;
    for (int a = m; a >= 0; a = gosn.groups[a].master)
      chain.insert(chain.end(), gosn.groups[a].patterns.begin(), gosn.groups[a].patterns.end());
    if (!is_acyclic(sharing_graph(tps, chain)).acyclic) r.got_acyclic = false;
    std::set<std::string> own, outer, shared;
    for (int t : gosn.groups[g].patterns)
      for (const auto& v : tps[t].vars()) own.insert(v);
    for (std::size_t i = gosn.groups[g].patterns.size(); i < chain.size(); ++i)
      for (const auto& v : tps[chain[i]].vars()) outer.insert(v);
    std::set_intersection(own.begin(), own.end(), outer.begin(), outer.end(), std::inserter(shared, shared.end()));
    bool covered = std::any_of(gosn.groups[g].patterns.begin(), gosn.groups[g].patterns.end(), [&](int t) {
      auto vs = tps[t].vars();
      return std::all_of(shared.begin(), shared.end(),
                         [&](const std::string& v) { return std::find(vs.begin(), vs.end(), v) != vs.end(); });
    });
    if (!covered) r.interfaces_covered = false;
    std::vector<int> crossing;
    for (std::size_t e = 0; e < got.edges.size(); ++e) {
      int ga = gosn.group_of_pattern[got.edges[e].a], gb = gosn.group_of_pattern[got.edges[e].b];
      if ((ga == m && gb == static_cast<int>(g)) || (gb == m && ga == static_cast<int>(g))) crossing.push_back(static_cast<int>(e));
    }
    if (crossing.empty() || equivalence_classes(got, crossing) != 1) r.one_equiv_class_per_pair = false;
  }
  if (gosn.groups.empty()) r.abs_acyclic = true;
  // A slave split into pieces can match a master row piecewise, so an acyclic GoT alone
  // does not make its partial bindings safe. Neither does a slave whose first pattern
  // cannot check every master binding at once.
  r.nb_required = !(r.interfaces_covered &&
                    ((r.got_acyclic && r.slaves_connected) || (r.slaves_acyclic && r.one_equiv_class_per_pair)));
  if (r.got_acyclic) r.regime = PruneRegime::Acyclic;
  else if (!r.nb_required) r.regime = PruneRegime::AbsCycles;
  else r.regime = PruneRegime::Greedy;
  return r;
}

std::vector<std::string> QueryStructure::variables() const { return vars(root); }

QueryStructure analyze(const NodePtr& root) {
  check_well_designed(root);
  check_safe_filters(root);
  QueryStructure qs;
  qs.root = root;
  qs.tps = patterns(root);
  qs.gosn = build_gosn(root);
  qs.got = build_got(qs.gosn, qs.tps);
  qs.report = classify(qs.gosn, qs.got, qs.tps);

  std::map<const PatternNode*, int> sn_of;
  int id = 0;
  for (const auto& b : bgps(root)) sn_of[b.get()] = id++;
  std::function<void(const NodePtr&)> walk = [&](const NodePtr& n) {
    if (!n || n->kind == NodeKind::Bgp) return;
    if (n->kind == NodeKind::Filter)
      qs.filters.push_back({n->filter, qs.gosn.group_of_sn[sn_of.at(leftmost_bgp(n->left).get())]});
    walk(n->left);
    walk(n->right);
  };
  walk(root);
  return qs;
}

}  // namespace bitopt
