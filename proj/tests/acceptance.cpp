// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "bitopt/bitmat.hpp"
#include "bitopt/compressed_row.hpp"
#include "bitopt/error.hpp"
#include "bitopt/oracle.hpp"
#include "bitopt/rewriter.hpp"
#include "support.hpp"

using namespace bitopt;
using namespace bitopt::testing;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  Verdict verdict(const std::string& summary) const {
    if (!failed_) return {true, summary};
    std::string d = summary + "; " + std::to_string(failed_) + " failure(s):";
    for (const auto& f : failures_) d += " [" + f + "]";
    return {false, d};
  }

 private:
  std::size_t failed_ = 0;
  std::vector<std::string> failures_;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fixed(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::fixed << v;
  return os.str();
}

struct Shell {
  int code = -1;
  std::string out;
};

Shell sh(const std::string& args) {
  std::string cmd = "\"" BITOPT_CLI "\" " + args;
  Shell s;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return s;
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), p)) s.out.append(buf.data(), n);
  int st = pclose(p);
  s.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return s;
}

// TSV from the CLI as a sorted table, with example.org IRIs shortened to ":local".
Table parse_tsv(const std::string& text) {
  Table rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  const std::string prefix = "<" + ex("");
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::size_t start = 0;
    while (true) {
      auto tab = line.find('\t', start);
      std::string cell = line.substr(start, tab == std::string::npos ? std::string::npos : tab - start);
      if (cell.starts_with(prefix) && cell.ends_with(">")) cell = ":" + cell.substr(prefix.size(), cell.size() - prefix.size() - 1);
      row.push_back(cell);
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    rows.push_back(row);
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

std::string quoted(const fs::path& p) { return "\"" + p.string() + "\""; }

const Table kRes1 = table({{":Julia", ":Seinfeld"},
                           {":Julia", ":Veep"},
                           {":Julia", ":NewAdvOldChristine"},
                           {":Julia", ":CurbYourEnthu"},
                           {":Larry", ":CurbYourEnthu"}});
const Table kRes2 = table({{":Julia", ":Seinfeld"}, {":Julia", ""}, {":Julia", ""}, {":Julia", ""}, {":Larry", ""}});
const Table kRes3 = table({{":Julia", ":Seinfeld"}, {":Larry", ""}});

RunOptions forced_order(Toggle nullify, Toggle best) {
  RunOptions o;
  o.prune = false;
  o.unsafe_order = true;
  o.nullify = nullify;
  o.best_match = best;
  return o;
}

Verdict golden_seinfeld() {
  Check c;
  auto t0 = Clock::now();
  auto dir = fs::temp_directory_path() / ("bitopt_accept_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  auto load = sh("load " + quoted(dir) + " " + quoted(data_dir() / "seinfeld.nt"));
  c.expect(load.code == 0, "load exit " + std::to_string(load.code));
  auto q1 = quoted(data_dir() / "q1.rq");
  auto res3 = sh("query " + quoted(dir) + " " + q1);
  c.expect(res3.code == 0 && parse_tsv(res3.out) == kRes3, "default query is not Res3");
  auto res1 = sh("query --no-prune --unsafe-order --nullify=off " + quoted(dir) + " " + q1);
  c.expect(res1.code == 0 && parse_tsv(res1.out) == kRes1, "forced order without nullification is not Res1");
  auto res2 = sh("query --no-prune --unsafe-order --nullify=on --best-match=off " + quoted(dir) + " " + q1);
  c.expect(res2.code == 0 && parse_tsv(res2.out) == kRes2, "forced order with nullification is not Res2");
  double cli_time = seconds_since(t0);
  fs::remove_all(dir);

  auto store = seinfeld();
  auto q = query_file("q1.rq");
  auto r2 = evaluate(q, store, forced_order(Toggle::On, Toggle::Off));
  c.expect(render(r2, store.dict()) == kRes2, "API Res2 mismatch");
  c.expect(render(best_match(r2), store.dict()) == kRes3, "best_match(Res2) != Res3");
  c.expect(render(evaluate(q, store), store.dict()) == kRes3, "API default is not Res3");
  c.expect(cli_time < 1.0, "runtime " + fixed(cli_time) + "s");
  return c.verdict("Res1/Res2/Res3 exact via CLI and API, " + fixed(cli_time) + "s");
}

Verdict compression() {
  Check c;
  auto rle = CompressedRow::encode_string("1110011110");
  c.expect(rle.encoding() == RowEncoding::RunLength && rle.to_string() == "[1] 3 2 4 1", "1110011110 -> " + rle.to_string());
  auto pos = CompressedRow::encode_string("0010010000");
  c.expect(pos.encoding() == RowEncoding::Positions && pos.to_string() == "3 6", "0010010000 -> " + pos.to_string());
  std::mt19937 rng(2024);
  for (int i = 0; i < 10000; ++i) {
    std::uint32_t width = 1 + rng() % 300;
    double density = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    std::bernoulli_distribution bit(density);
    std::vector<bool> bits(width);
    for (std::size_t k = 0; k < width; ++k) bits[k] = bit(rng);
    auto row = CompressedRow::encode_bits(bits);
    std::vector<std::uint32_t> positions;
    for (std::uint32_t k = 0; k < width; ++k)
      if (bits[k]) positions.push_back(k + 1);
    bool ok = row.bits() == bits && row.positions() == positions && row.popcount() == positions.size() &&
              row == CompressedRow::encode(positions, width) &&
              row == CompressedRow::from_parts(row.encoding(), row.first_bit(), row.width(), row.payload());
    c.expect(ok, "round trip at fuzz row " + std::to_string(i));
  }
  return c.verdict("worked examples plus 10000 fuzzed rows");
}

Verdict oracle_equivalence() {
  Check c;
  auto t0 = Clock::now();
  Generator gen(3);
  QueryShape shape;
  int with_union = 0, with_filter = 0, with_optional = 0;
  for (int i = 0; i < 500; ++i) {
    auto store = store_from(gen.store_text(40));
    std::string text;
    auto q = gen.query(shape, &text);
    with_union += text.find("UNION") != std::string::npos;
    with_filter += text.find("FILTER") != std::string::npos;
    with_optional += text.find("OPTIONAL") != std::string::npos;
    try {
      auto engine = minimum_union(render(evaluate(q, store), store.dict()));
      auto oracle = minimum_union(render(oracle_eval(q, store), store.dict()));
      c.expect(engine == oracle, "query " + std::to_string(i) + ": " + text);
    } catch (const Error& e) {
      c.expect(false, "query " + std::to_string(i) + " threw " + e.what());
    }
  }
  double t = seconds_since(t0);
  c.expect(t < 60.0, "took " + fixed(t) + "s");
  return c.verdict("500 queries (" + std::to_string(with_optional) + " OPTIONAL, " + std::to_string(with_union) + " UNION, " +
                   std::to_string(with_filter) + " FILTER) match the oracle, " + fixed(t) + "s");
}

Verdict nullification_skip() {
  Check c;
  Generator gen(4);
  QueryShape shape;
  int eligible = 0;
  for (int i = 0; i < 500; ++i) {
    auto store = store_from(gen.store_text());
    std::string text;
    auto q = gen.query(shape, &text);
    auto run = run_query(q, store);
    if (run.disjuncts.size() != 1 || run.disjuncts[0].qs.report.nb_required) continue;
    ++eligible;
    RunOptions forced;
    forced.nullify = Toggle::On;
    forced.best_match = Toggle::On;
    RunOptions off;
    off.nullify = Toggle::Off;
    auto strict = render(run_query(q, store, forced).full, store.dict());
    c.expect(render(run.full, store.dict()) == strict, "default run, query " + std::to_string(i) + ": " + text);
    c.expect(render(run_query(q, store, off).full, store.dict()) == strict, "nullification off, query " + std::to_string(i) + ": " + text);
  }

  auto store = store_from(
      "<" + ex("x1") + "> <" + ex("p1") + "> <" + ex("y1") + "> .\n"
      "<" + ex("x2") + "> <" + ex("p1") + "> <" + ex("y2") + "> .\n"
      "<" + ex("x1") + "> <" + ex("p2") + "> <" + ex("w1") + "> .\n"
      "<" + ex("x2") + "> <" + ex("p2") + "> <" + ex("w2") + "> .\n"
      "<" + ex("w1") + "> <" + ex("p3") + "> <" + ex("y2") + "> .\n"
      "<" + ex("w2") + "> <" + ex("p3") + "> <" + ex("y1") + "> .\n");
  auto q = parse_query("SELECT * WHERE { ?x :p1 ?y OPTIONAL { ?x :p2 ?w . ?w :p3 ?y } }");
  auto run = run_query(q, store);
  c.expect(run.disjuncts.size() == 1 && run.disjuncts[0].qs.report.nb_required, "exception2 query not nb_required");
  auto oracle = render(oracle_eval(q, store), store.dict());
  c.expect(render(run.result, store.dict()) == oracle, "default run differs from the oracle on the witness");
  RunOptions skip;
  skip.nullify = Toggle::Off;
  skip.best_match = Toggle::Off;
  auto unsafe = render(evaluate(q, store, skip), store.dict());
  bool witness = unsafe != oracle;
  c.expect(witness, "skipping nullification did not change the witness result");
  std::string shown;
  for (const auto& row : unsafe) {
    shown += shown.empty() ? "" : " ";
    shown += "(";
    for (std::size_t k = 0; k < row.size(); ++k) shown += (k ? "," : "") + (row[k].empty() ? std::string("NULL") : row[k]);
    shown += ")";
  }
  return c.verdict(std::to_string(eligible) + " nb_required=false queries identical with nullification off, auto and forced; exception2 without it gives " +
                   shown);
}

Verdict minimality() {
  Check c;
  Generator gen(5);
  QueryShape shape;
  shape.filters = false;
  int acyclic = 0, disjuncts = 0;
  for (int i = 0; i < 500; ++i) {
    auto store = store_from(gen.store_text());
    std::string text;
    auto q = gen.query(shape, &text);
    auto run = run_query(q, store);
    bool counted = false;
    for (const auto& d : run.disjuncts) {
      if (!d.qs.report.got_acyclic) continue;
      if (!counted) ++acyclic;
      counted = true;
      ++disjuncts;
      auto w = witnessed(d.qs, d.loaded.patterns, oracle_full(d.qs.root, store), store);
      std::size_t extra = 0;
      for (std::size_t t = 0; t < w.size(); ++t)
        for (auto pr : d.loaded.patterns[t].bm.pairs()) extra += !w[t].contains(pr);
      c.expect(extra == 0, std::to_string(extra) + " unused triples in query " + std::to_string(i) + ": " + text);
    }
  }
  return c.verdict(std::to_string(acyclic) + " acyclic queries (" + std::to_string(disjuncts) +
                   " disjuncts), every surviving triple is in an oracle row");
}

GoT labelled(int n, const std::vector<std::vector<std::string>>& labels, std::uint64_t code, int choices) {
  GoT g;
  g.nodes = n;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      int pick = static_cast<int>(code % choices);
      code /= choices;
      if (pick) g.edges.push_back({a, b, labels[pick - 1]});
    }
  return g;
}

Verdict acyclicity() {
  Check c;
  auto corner = analyze(parse_query("SELECT * WHERE { ?a :p1 ?b . ?b :p2 ?c . ?c :p3 ?a . ?a ?b ?c }").root);
  c.expect(corner.report.got_acyclic, "corner query not acyclic");
  auto cycle = analyze(parse_query("SELECT * WHERE { ?a :p1 ?b . ?b :p2 ?c . ?c :p3 ?a }").root);
  c.expect(!cycle.report.got_acyclic, "3-cycle classified acyclic");

  const std::vector<std::vector<std::string>> three = {{"a"}, {"b"}, {"c"}, {"a", "b"}, {"a", "c"}, {"b", "c"}, {"a", "b", "c"}};
  const std::vector<std::vector<std::string>> two = {{"a"}, {"b"}, {"a", "b"}};
  std::uint64_t graphs = 0, acyclic = 0;
  auto sweep = [&](int n, const std::vector<std::vector<std::string>>& labels) {
    int choices = static_cast<int>(labels.size()) + 1;
    std::uint64_t total = 1;
    for (int e = 0; e < n * (n - 1) / 2; ++e) total *= choices;
    for (std::uint64_t code = 0; code < total; ++code) {
      auto g = labelled(n, labels, code, choices);
      bool got = is_acyclic(g).acyclic;
      c.expect(got == reference_acyclic(g), "n=" + std::to_string(n) + " code=" + std::to_string(code));
      ++graphs;
      acyclic += got;
    }
  };
  for (int n = 1; n <= 4; ++n) sweep(n, three);
  sweep(5, two);
  return c.verdict("corner acyclic, 3-cycle cyclic; " + std::to_string(graphs) + " labelled graphs (" + std::to_string(acyclic) +
                   " acyclic) agree with exhaustive leaf elimination");
}

NodePtr union_all(const std::vector<NodePtr>& parts) {
  NodePtr acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = PatternNode::union_of(acc, parts[i]);
  return acc;
}

Verdict unf() {
  Check c;
  auto q2 = query_file("q2.rq");
  auto u2 = to_unf(push_filters(q2.root));
  c.expect(u2.disjuncts.size() == 2, "Q2 gives " + std::to_string(u2.disjuncts.size()) + " disjuncts");
  c.expect(!u2.rule3_used, "Q2 used rule 3");

  auto store = seinfeld();
  auto r3 = parse_query("SELECT * WHERE { :Jerry :hasFriend ?f OPTIONAL { { ?f :actedIn ?s } UNION { ?f :hasFriend ?s } } }");
  auto run = run_query(r3, store);
  c.expect(run.unf.rule3_used, "P1 ⟕ (P2 ∪ P3) did not use rule 3");
  c.expect(run.best_match_applied, "best_match not applied after rule 3");
  c.expect(minimum_union(render(run.result, store.dict())) == minimum_union(render(oracle_eval(r3, store), store.dict())),
           "rule 3 result differs from the oracle");

  Generator gen(7);
  QueryShape shape;
  int checked = 0, rule3 = 0;
  for (int i = 0; checked < 200 && i < 1000; ++i) {
    auto s = store_from(gen.store_text());
    std::string text;
    auto q = gen.query(shape, &text);
    auto header = vars(q.root);
    try {
      auto original = minimum_union(render_as(oracle_full(q.root, s), header, s.dict()));
      auto u = to_unf(push_filters(q.root));
      rule3 += u.rule3_used;
      auto rewritten = minimum_union(render_as(oracle_full(union_all(u.disjuncts), s), header, s.dict()));
      c.expect(original == rewritten, "instance " + std::to_string(i) + ": " + text);
      ++checked;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Limit) c.expect(false, std::string("instance threw ") + e.what());
    }
  }
  c.expect(checked == 200, "only " + std::to_string(checked) + " instances evaluated");
  return c.verdict("Q2 -> 2 disjuncts, rule 3 applies best_match, " + std::to_string(checked) + " rewrites preserve semantics (" +
                   std::to_string(rule3) + " via rule 3)");
}

Verdict distinct_bmm_path() {
  Check c;
  auto movies_store = movies();
  auto movie_q = query_file("movies_distinct.rq");
  auto run = run_query(movie_q, movies_store);
  auto rows = render(run.result, movies_store.dict());
  auto hits = std::count(rows.begin(), rows.end(), std::vector<std::string>{":UmaThurman", ":QuentinTarantino"});
  c.expect(hits == 1, "(:UmaThurman,:QuentinTarantino) appears " + std::to_string(hits) + " times");
  c.expect(run.distinct.path == "bmm", "movie query took path " + run.distinct.path);

  Generator gen(8);
  QueryShape shape;
  shape.unions = false;
  shape.filters = false;
  shape.distinct = true;
  int compared = 0, bmm = 0, bgp_only = 0, shrink_steps = 0;
  RunOptions naive;
  naive.distinct_bmm = false;
  for (int i = 0; compared < 100 && i < 10000; ++i) {
    auto store = store_from(gen.store_text());
    std::string text;
    auto q = gen.query(shape, &text);
    auto structure = analyze(push_filters(q.root));
    if (!structure.report.got_acyclic) continue;
    ++compared;
    bgp_only += text.find("OPTIONAL") == std::string::npos;
    try {
      auto r = run_query(q, store);
      if (r.distinct.path != "naive") ++bmm;
      for (const auto& [g, sizes] : r.distinct.node_counts) {
        shrink_steps += static_cast<int>(sizes.size());
        c.expect(std::is_sorted(sizes.rbegin(), sizes.rend()), "node count grew in query " + std::to_string(i));
      }
      c.expect(render(r.result, store.dict()) == render(evaluate(q, store, naive), store.dict()),
               "BMM and naive differ on query " + std::to_string(i) + ": " + text);
    } catch (const Error& e) {
      c.expect(false, std::string("query threw ") + e.what());
    }
  }
  c.expect(compared == 100, "only " + std::to_string(compared) + " acyclic queries generated");
  c.expect(bmm >= 50, "only " + std::to_string(bmm) + " queries took the BMM path");
  return c.verdict("movie pair once; " + std::to_string(compared) + " acyclic DISTINCT queries (" + std::to_string(bgp_only) +
                   " BGP, " + std::to_string(bmm) + " via BMM) equal the naive path; " + std::to_string(shrink_steps) +
                   " MCS sizes, never increasing");
}

Verdict bitmat_oracles() {
  Check c;
  using Dense = std::vector<std::vector<bool>>;
  std::mt19937 rng(9);
  auto random_dense = [&](std::uint32_t rows, std::uint32_t cols, double density) {
    std::bernoulli_distribution bit(density);
    Dense d(rows, std::vector<bool>(cols));
    for (auto& r : d)
      for (std::size_t k = 0; k < cols; ++k) r[k] = bit(rng);
    return d;
  };
  auto to_bitmat = [](const Dense& d, std::uint32_t cols) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (std::uint32_t r = 0; r < d.size(); ++r)
      for (std::uint32_t k = 0; k < cols; ++k)
        if (d[r][k]) pairs.emplace_back(r + 1, k + 1);
    return BitMat::from_pairs(BitMatKind::Derived, 0, static_cast<std::uint32_t>(d.size()), cols, pairs);
  };
  auto to_dense = [](const BitMat& bm) {
    Dense d(bm.rows(), std::vector<bool>(bm.cols()));
    for (auto [r, k] : bm.pairs()) d[r - 1][k - 1] = true;
    return d;
  };
  for (int i = 0; i < 1000; ++i) {
    std::uint32_t n = 1 + rng() % 64, m = 1 + rng() % 64, k = 1 + rng() % 64;
    double density = std::uniform_real_distribution<double>(0.0, 0.6)(rng);
    auto da = random_dense(n, m, density);
    auto db = random_dense(m, k, density);
    auto a = to_bitmat(da, m);
    auto b = to_bitmat(db, k);

    auto rows = a.fold(Dim::Row);
    auto cols = a.fold(Dim::Column);
    bool fold_ok = true;
    for (std::uint32_t r = 0; r < n; ++r)
      fold_ok &= rows.test(r + 1) == std::any_of(da[r].begin(), da[r].end(), [](bool x) { return x; });
    for (std::uint32_t j = 0; j < m; ++j) {
      bool any = false;
      for (std::uint32_t r = 0; r < n; ++r) any = any || da[r][j];
      fold_ok &= cols.test(j + 1) == any;
    }
    c.expect(fold_ok, "fold mismatch on matrix " + std::to_string(i));

    BitArray row_mask(n), col_mask(m);
    for (std::uint32_t r = 1; r <= n; ++r)
      if (rng() % 2) row_mask.set(r);
    for (std::uint32_t j = 1; j <= m; ++j)
      if (rng() % 2) col_mask.set(j);
    auto by_rows = a;
    by_rows.unfold(row_mask, Dim::Row);
    auto by_cols = a;
    by_cols.unfold(col_mask, Dim::Column);
    Dense expect_rows = da, expect_cols = da;
    for (std::uint32_t r = 0; r < n; ++r)
      for (std::uint32_t j = 0; j < m; ++j) {
        expect_rows[r][j] = da[r][j] && row_mask.test(r + 1);
        expect_cols[r][j] = da[r][j] && col_mask.test(j + 1);
      }
    c.expect(to_dense(by_rows) == expect_rows && to_dense(by_cols) == expect_cols, "unfold mismatch on matrix " + std::to_string(i));

    Dense prod(n, std::vector<bool>(k));
    for (std::uint32_t r = 0; r < n; ++r)
      for (std::uint32_t x = 0; x < k; ++x)
        for (std::uint32_t j = 0; j < m && !prod[r][x]; ++j) prod[r][x] = da[r][j] && db[j][x];
    c.expect(to_dense(bmm(a, b)) == prod, "bmm mismatch on matrix " + std::to_string(i));
  }
  return c.verdict("fold, unfold and bmm match dense loops on 1000 random matrices up to 64x64");
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Verdict()>>> criteria = {
      {1, golden_seinfeld}, {2, compression},  {3, oracle_equivalence}, {4, nullification_skip}, {5, minimality},
      {6, acyclicity},      {7, unf},          {8, distinct_bmm_path},  {9, bitmat_oracles},
  };
  int failed = 0;
  for (const auto& [id, run] : criteria) {
    Verdict v;
    auto t0 = Clock::now();
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("uncaught exception: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << v.detail << " (" << fixed(seconds_since(t0))
              << "s)" << std::endl;
  }
  return failed ? 1 : 0;
}
