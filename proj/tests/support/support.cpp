#include "support.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "bitopt/error.hpp"
#include "bitopt/rewriter.hpp"
#include "bitopt/structure.hpp"

namespace bitopt::testing {

namespace {

constexpr std::string_view kBase = "http://example.org/";

std::string cell(std::uint32_t node, const Dictionary& dict) {
  if (!node) return "";
  const auto& t = dict.term_of_node(node);
  if (t.kind == TermKind::Iri && t.value.starts_with(kBase)) return ":" + t.value.substr(kBase.size());
  return t.to_display();
}

// r1 is subsumed by r2: r2 agrees on r1's bound cells and binds strictly more.
bool subsumed(const std::vector<std::string>& r1, const std::vector<std::string>& r2) {
  bool more = false;
  for (std::size_t i = 0; i < r1.size(); ++i) {
    if (r1[i].empty()) more |= !r2[i].empty();
    else if (r1[i] != r2[i]) return false;
  }
  return more;
}

}  // namespace

std::filesystem::path data_dir() { return BITOPT_TEST_DATA; }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string ex(std::string_view local) { return std::string(kBase) + std::string(local); }

TripleStore store_from(std::string_view ntriples) {
  std::istringstream in{std::string(ntriples)};
  return TripleStore::from_ntriples(in);
}

TripleStore seinfeld() { return TripleStore::load_file(data_dir() / "seinfeld.nt"); }
TripleStore movies() { return TripleStore::load_file(data_dir() / "movies.nt"); }
Query query_file(std::string_view name) { return parse_query(read_file(data_dir() / std::string(name))); }

Table render(const ResultSet& rs, const Dictionary& dict) { return render_as(rs, rs.header, dict); }

Table render_as(const ResultSet& rs, const std::vector<std::string>& vars, const Dictionary& dict) {
  auto projected = project(rs, vars);
  Table out;
  for (const auto& row : projected.rows) {
    std::vector<std::string> r;
    for (auto v : row) r.push_back(cell(v, dict));
    out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Table table(std::initializer_list<std::vector<std::string>> rows) {
  Table out(rows);
  std::sort(out.begin(), out.end());
  return out;
}

Table minimum_union(Table rows) {
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  Table out;
  for (const auto& r : rows) {
    bool dominated = false;
    for (const auto& other : rows) dominated |= subsumed(r, other);
    if (!dominated) out.push_back(r);
  }
  return out;
}

namespace {

bool subset(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// Classes of the labels by naive transitive closure of "comparable".
int classes(const std::vector<std::vector<std::string>>& labels) {
  std::vector<int> cls(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) cls[i] = static_cast<int>(i);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < labels.size(); ++i)
      for (std::size_t j = 0; j < labels.size(); ++j)
        if ((subset(labels[i], labels[j]) || subset(labels[j], labels[i])) && cls[i] != cls[j]) {
          cls[i] = cls[j] = std::min(cls[i], cls[j]);
          changed = true;
        }
  }
  return static_cast<int>(std::set<int>(cls.begin(), cls.end()).size());
}

bool eliminate(const GoT& got, std::vector<bool>& alive, int left) {
  if (left == 0) return true;
  for (int n = 0; n < got.nodes; ++n) {
    if (!alive[n]) continue;
    std::vector<std::vector<std::string>> labels;
    for (const auto& e : got.edges)
      if ((e.a == n && alive[e.b]) || (e.b == n && alive[e.a])) labels.push_back(e.label);
    if (classes(labels) > 1) continue;
    alive[n] = false;
    bool ok = eliminate(got, alive, left - 1);
    alive[n] = true;
    if (ok) return true;
  }
  return false;
}

}  // namespace

bool reference_acyclic(const GoT& got) {
  std::vector<bool> alive(got.nodes, true);
  return eliminate(got, alive, got.nodes);
}

std::vector<PairSet> witnessed(const QueryStructure& qs, const std::vector<WorkingPattern>& wps,
                               const ResultSet& oracle_rows, const TripleStore& store) {
  const auto& dict = store.dict();
  std::set<std::array<std::uint32_t, 3>> stored;
  for (const auto& t : store.triples())
    stored.insert({dict.node_of_subject(t.s), dict.node_of_predicate(t.p), dict.node_of_object(t.o)});
  std::map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < oracle_rows.header.size(); ++i) slot[oracle_rows.header[i]] = i;

  std::vector<PairSet> out(wps.size());
  for (const auto& row : oracle_rows.rows) {
    auto value = [&](const PatternTerm& t) -> std::uint32_t {
      return t.is_var ? row[slot.at(t.var)] : dict.node_of(t.constant);
    };
    auto matched = [&](int p) {
      const auto& tp = qs.tps[p];
      std::array<std::uint32_t, 3> spo{value(tp.s), value(tp.p), value(tp.o)};
      return spo[0] && spo[1] && spo[2] && stored.contains(spo);
    };
    std::vector<bool> used(qs.gosn.groups.size(), false);
    for (std::size_t g = 0; g < qs.gosn.groups.size(); ++g) {
      const auto& group = qs.gosn.groups[g];
      used[g] = (group.master < 0 || used[group.master]) && std::all_of(group.patterns.begin(), group.patterns.end(), matched);
      if (!used[g]) continue;
      for (int p : group.patterns) {
        const auto& wp = wps[p];
        auto coord = [&](const std::string& v) -> std::uint32_t { return v.empty() ? 1 : row[slot.at(v)]; };
        out[p].insert({coord(wp.row_var), coord(wp.col_var)});
      }
    }
  }
  return out;
}

struct Generator::Scope {
  std::vector<std::string> certain;  // always bound where the next element joins
  std::vector<std::string> all;      // every variable mentioned in the query
};

std::string Generator::store_text(int max_triples) {
  std::set<std::string> lines;
  int n = uniform(5, max_triples);
  for (int i = 0; i < n; ++i) {
    std::string s = "<" + ex("e" + std::to_string(uniform(0, 5))) + ">";
    std::string p = "<" + ex("p" + std::to_string(uniform(0, 2))) + ">";
    std::string o = chance(0.8) ? "<" + ex("e" + std::to_string(uniform(0, 5))) + ">"
                                : "\"" + std::to_string(uniform(1, 4)) + "\"^^<http://www.w3.org/2001/XMLSchema#integer>";
    lines.insert(s + " " + p + " " + o + " .\n");
  }
  std::string out;
  for (const auto& l : lines) out += l;
  return out;
}

std::string Generator::term(Scope& scope, bool connect, std::vector<std::string>& bound) {
  auto pick = [&](const std::vector<std::string>& from) { return from[uniform(0, static_cast<int>(from.size()) - 1)]; };
  std::string v;
  if (connect && !scope.certain.empty()) {
    v = pick(scope.certain);
  } else if (!scope.certain.empty() && chance(0.5)) {
    v = pick(scope.certain);
  } else {
    v = "v" + std::to_string(fresh_++);
    scope.all.push_back(v);
  }
  bound.push_back(v);
  return "?" + v;
}

std::string Generator::filter(const std::vector<std::string>& vars) {
  auto var = [&] { return "?" + vars[uniform(0, static_cast<int>(vars.size()) - 1)]; };
  auto atom = [&]() -> std::string {
    switch (uniform(0, 4)) {
      case 0: return var() + " = :e" + std::to_string(uniform(0, 5));
      case 1: return var() + " != :e" + std::to_string(uniform(0, 5));
      case 2: return var() + " < " + std::to_string(uniform(1, 4));
      case 3: return var() + " >= " + std::to_string(uniform(1, 4));
      default: return var() + " = " + var();
    }
  };
  switch (uniform(0, 5)) {
    case 0: return "(" + atom() + " || " + atom() + ")";
    case 1: return "(" + atom() + " && " + atom() + ")";
    case 2: return "(!(" + atom() + "))";
    default: return "(" + atom() + ")";
  }
}

std::string Generator::group(Scope& scope, int& budget, int depth) {
  std::string out;
  std::vector<std::string> own;
  int n = uniform(1, std::min(budget, 3));
  budget -= n;
  for (int i = 0; i < n; ++i) {
    std::vector<std::string> bound;
    std::string p = ":p" + std::to_string(uniform(0, 2));
    std::string s, o;
    int shape = uniform(0, 9);
    if (shape == 0) {
      s = ":e" + std::to_string(uniform(0, 5));
      o = term(scope, true, bound);
    } else if (shape == 1) {
      s = term(scope, true, bound);
      o = chance(0.7) ? ":e" + std::to_string(uniform(0, 5)) : std::to_string(uniform(1, 4));
    } else if (chance(0.5)) {
      s = term(scope, true, bound);
      o = term(scope, false, bound);
    } else {
      o = term(scope, true, bound);
      s = term(scope, false, bound);
    }
    out += "  " + s + " " + p + " " + o + " .\n";
    for (const auto& v : bound) {
      if (std::find(scope.certain.begin(), scope.certain.end(), v) == scope.certain.end()) scope.certain.push_back(v);
      if (std::find(own.begin(), own.end(), v) == own.end()) own.push_back(v);
    }
  }
  while (budget > 0 && depth < 3 && chance(0.75)) {
    bool can_union = unions_ && budget >= 2;
    if (optional_ && (!can_union || chance(0.6))) {
      Scope inner{scope.certain, {}};
      out += "  OPTIONAL {\n" + group(inner, budget, depth + 1) + "  }\n";
      scope.all.insert(scope.all.end(), inner.all.begin(), inner.all.end());
    } else if (can_union) {
      Scope left{scope.certain, {}}, right{scope.certain, {}};
      int lb = std::max(1, budget / 2);
      int rb = budget - lb;
      if (rb < 1) break;
      budget = 0;
      std::string l = group(left, lb, depth + 1);
      std::string r = group(right, rb, depth + 1);
      budget = lb + rb;
      out += "  { " + l + "  } UNION {\n" + r + "  }\n";
      scope.all.insert(scope.all.end(), left.all.begin(), left.all.end());
      scope.all.insert(scope.all.end(), right.all.begin(), right.all.end());
    } else {
      break;
    }
  }
  if (filters_ && chance(0.3)) out += "  FILTER " + filter(own) + "\n";
  return out;
}

std::string Generator::query_text(const QueryShape& shape) {
  optional_ = shape.optional;
  unions_ = shape.unions;
  filters_ = shape.filters;
  fresh_ = 0;
  Scope scope;
  int budget = uniform(std::min(2, shape.max_patterns), shape.max_patterns);
  std::string body = group(scope, budget, 0);
  std::vector<std::string> proj = scope.all;
  if (shape.project_subset && chance(0.5)) {
    std::vector<std::string> pick;
    for (const auto& v : proj)
      if (chance(0.5)) pick.push_back(v);
    if (pick.empty()) pick.push_back(proj.front());
    proj = pick;
  }
  std::string head = "SELECT ";
  if (shape.distinct) head += "DISTINCT ";
  for (const auto& v : proj) head += "?" + v + " ";
  return head + "WHERE {\n" + body + "}\n";
}

Query Generator::query(const QueryShape& shape, std::string* text) {
  for (;;) {
    std::string t = query_text(shape);
    try {
      Query q = parse_query(t);
      bool ok = true;
      for (const auto& d : to_unf(push_filters(q.root)).disjuncts) ok &= analyze(push_filters(d)).report.connected;
      if (!ok) continue;
      if (text) *text = t;
      return q;
    } catch (const Error&) {
    }
  }
}

}  // namespace bitopt::testing
