#include "bitopt/explain.hpp"

#include <sstream>

namespace bitopt {

namespace {

const char* flag(bool b) { return b ? "true" : "false"; }

std::string pattern_name(const QueryStructure& qs, int t) { return "T" + std::to_string(qs.tps[t].index + 1); }

std::string pattern_list(const QueryStructure& qs, const std::vector<int>& ids) {
  std::string out;
  for (int t : ids) out += (out.empty() ? "" : " ") + pattern_name(qs, t);
  return out;
}

std::string label(const std::vector<std::string>& vars) {
  std::string out;
  for (const auto& v : vars) out += (out.empty() ? "?" : ", ?") + v;
  return "{" + out + "}";
}

}  // namespace

std::string explain_structure(const QueryStructure& qs) {
  std::ostringstream os;
  os << "algebra=" << serialize(qs.root) << "\n";
  for (std::size_t i = 0; i < qs.tps.size(); ++i) os << "pattern." << pattern_name(qs, static_cast<int>(i)) << "=" << qs.tps[i].to_string() << "\n";
  const auto& g = qs.gosn;
  for (const auto& sn : g.supernodes)
    os << "supernode.S" << sn.id + 1 << "=" << pattern_list(qs, sn.patterns) << (g.absolute[sn.id] ? " absolute" : "") << "\n";
  for (auto [m, s] : g.uni) os << "uni=S" << m + 1 << " -> S" << s + 1 << "\n";
  for (auto [a, b] : g.bi) os << "bi=S" << a + 1 << " <-> S" << b + 1 << "\n";
  for (std::size_t i = 0; i < g.groups.size(); ++i) {
    std::string sns;
    for (int s : g.groups[i].supernodes) sns += (sns.empty() ? "S" : " S") + std::to_string(s + 1);
    os << "group." << i << "=" << sns << " master=" << g.groups[i].master << "\n";
  }
  for (const auto& e : qs.got.edges)
    os << "got_edge=" << pattern_name(qs, e.a) << " - " << pattern_name(qs, e.b) << " " << label(e.label) << "\n";
  const auto& r = qs.report;
  os << "connected=" << flag(r.connected) << "\n"
     << "well_designed=" << flag(r.well_designed) << "\n"
     << "got_acyclic=" << flag(r.got_acyclic) << "\n"
     << "slaves_acyclic=" << flag(r.slaves_acyclic) << "\n"
     << "abs_acyclic=" << flag(r.abs_acyclic) << "\n"
     << "one_equiv_class_per_pair=" << flag(r.one_equiv_class_per_pair) << "\n"
     << "slaves_connected=" << flag(r.slaves_connected) << "\n"
     << "interfaces_covered=" << flag(r.interfaces_covered) << "\n"
     << "nb_required=" << flag(r.nb_required) << "\n"
     << "regime=" << to_string(r.regime) << "\n";
  for (const auto& f : qs.filters) os << "filter=" << f.expr.to_string() << " group=" << f.group << "\n";
  return os.str();
}

std::string explain(const Query& q, const QueryRun& run) {
  std::ostringstream os;
  os << "explain_version=1\n"
     << "algebra=" << serialize(q.root) << "\n"
     << "pushed=" << serialize(run.pushed) << "\n"
     << "unf_disjuncts=" << run.unf.disjuncts.size() << "\n";
  for (const auto& d : run.unf.disjuncts) os << "unf=" << serialize(d) << "\n";
  os << "rule3_used=" << flag(run.unf.rule3_used) << "\n"
     << "pruned=" << flag(run.pruned) << "\n";
  for (std::size_t i = 0; i < run.disjuncts.size(); ++i) {
    const auto& d = run.disjuncts[i];
    const auto& qs = d.qs;
    os << "[disjunct " << i + 1 << "]\n" << explain_structure(qs);
    os << "load_order=" << pattern_list(qs, d.log.load_order) << "\n";
    for (const auto& [t, c] : d.log.load_filters) os << "load_filter=" << pattern_name(qs, t) << " " << c.to_string() << "\n";
    for (const auto& s : d.log.active) os << "active=" << to_string(s, qs.tps) << "\n";
    for (const auto& s : d.log.executed) os << "semijoin=" << to_string(s, qs.tps) << "\n";
    for (std::size_t t = 0; t < d.loaded.patterns.size(); ++t)
      os << "count." << pattern_name(qs, static_cast<int>(t)) << "=" << d.loaded.patterns[t].count() << "\n";
    for (const auto& f : d.loaded.residual_filters) os << "residual_filter=" << f.expr.to_string() << " group=" << f.group << "\n";
    os << "stps=" << pattern_list(qs, d.stps) << "\n"
       << "nulreqd=" << flag(d.nulreqd) << "\n"
       << "join_calls=" << d.stats.calls << "\n"
       << "join_rows=" << d.stats.emitted << "\n"
       << "join_dropped=" << d.stats.dropped << "\n"
       << "filter_nullified=" << flag(d.stats.filter_nullified) << "\n";
  }
  os << "[result]\n"
     << "best_match=" << flag(run.best_match_applied) << "\n"
     << "rows=" << run.result.rows.size() << "\n";
  if (q.distinct) {
    os << "distinct_path=" << run.distinct.path << "\n";
    if (!run.distinct.reason.empty()) os << "distinct_reason=" << run.distinct.reason << "\n";
    for (const auto& [g, sizes] : run.distinct.node_counts) {
      os << "distinct_nodes.g" << g << "=";
      for (std::size_t i = 0; i < sizes.size(); ++i) os << (i ? " " : "") << sizes[i];
      os << "\n";
    }
    for (const auto& s : run.distinct.steps) os << "distinct_step=" << s << "\n";
  }
  return os.str();
}

std::string gosn_dot(const QueryStructure& qs) {
  std::ostringstream os;
  os << "digraph gosn {\n";
  for (const auto& sn : qs.gosn.supernodes)
    os << "  S" << sn.id + 1 << " [label=\"S" << sn.id + 1 << ": " << pattern_list(qs, sn.patterns) << "\"];\n";
  for (auto [m, s] : qs.gosn.uni) os << "  S" << m + 1 << " -> S" << s + 1 << ";\n";
  for (auto [a, b] : qs.gosn.bi) os << "  S" << a + 1 << " -> S" << b + 1 << " [dir=both];\n";
  os << "}\n";
  return os.str();
}

std::string got_dot(const QueryStructure& qs) {
  std::ostringstream os;
  os << "graph got {\n";
  for (std::size_t i = 0; i < qs.tps.size(); ++i) {
    auto name = pattern_name(qs, static_cast<int>(i));
    os << "  " << name << " [label=\"" << name << "\"];\n";
  }
  for (const auto& e : qs.got.edges)
    os << "  " << pattern_name(qs, e.a) << " -- " << pattern_name(qs, e.b) << " [label=\"" << label(e.label) << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace bitopt
