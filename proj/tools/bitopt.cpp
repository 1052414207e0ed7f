#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bitopt/error.hpp"
#include "bitopt/executor.hpp"
#include "bitopt/explain.hpp"
#include "bitopt/oracle.hpp"
#include "bitopt/query.hpp"
#include "bitopt/store.hpp"

namespace fs = std::filesystem;
using namespace bitopt;

namespace {

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Io: return 2;
    case ErrorKind::Unsupported: return 3;
    case ErrorKind::Parse:
    case ErrorKind::Rejected: return 4;
    default: return 1;
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_tsv(std::ostream& out, const ResultSet& rs, const Dictionary& dict) {
  for (std::size_t i = 0; i < rs.header.size(); ++i) out << (i ? "\t" : "") << rs.header[i];
  out << "\n";
  for (const auto& row : rs.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << "\t";
      if (row[i]) out << dict.term_of_node(row[i]).to_display();
    }
    out << "\n";
  }
}

Toggle toggle(const std::string& s) { return s == "on" ? Toggle::On : s == "off" ? Toggle::Off : Toggle::Auto; }

struct LoadArgs {
  std::string dir, file;
  bool force = false;
};

struct QueryArgs {
  std::vector<std::string> paths;
  bool explain = false, oracle = false, unsafe_order = false, no_prune = false;
  std::string nullify = "auto";
  std::string best_match = "auto";
  std::string dot;
};

int cmd_load(const LoadArgs& a) {
  fs::path dir(a.dir);
  if (fs::exists(dir) && !fs::is_empty(dir) && !a.force)
    fail(ErrorKind::Io, a.dir + " is not empty (use --force to overwrite)");
  auto store = TripleStore::load_file(a.file);
  if (a.force && fs::exists(dir)) fs::remove_all(dir);
  store.save(dir);
  std::cout << store.size() << " triples, " << store.dict().num_predicates() << " predicates\n";
  return 0;
}

int cmd_query(const QueryArgs& a) {
  std::string dir, file;
  if (a.paths.size() == 2) {
    dir = a.paths[0];
    file = a.paths[1];
  } else {
    const char* env = std::getenv("BITOPT_STORE");
    if (!env) fail(ErrorKind::Io, "no store directory given and BITOPT_STORE is unset");
    dir = env;
    file = a.paths[0];
  }
  auto query = parse_query(read_text(file));
  auto store = TripleStore::open(dir);

  if (a.oracle) {
    if (a.explain) std::cerr << "explain_version=1\nmode=oracle\nalgebra=" << serialize(query.root) << "\n";
    auto rs = oracle_eval(query, store);
    sort_rows(rs);
    write_tsv(std::cout, rs, store.dict());
    return 0;
  }

  RunOptions opts;
  opts.prune = !a.no_prune;
  opts.unsafe_order = a.unsafe_order;
  opts.nullify = toggle(a.nullify);
  opts.best_match = toggle(a.best_match);
  auto run = run_query(query, store, opts);
  if (a.explain) std::cerr << explain(query, run);
  if (!a.dot.empty() && !run.disjuncts.empty()) {
    std::ofstream(a.dot + ".gosn.dot") << gosn_dot(run.disjuncts.front().qs);
    std::ofstream(a.dot + ".got.dot") << got_dot(run.disjuncts.front().qs);
  }
  sort_rows(run.result);
  write_tsv(std::cout, run.result, store.dict());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bitopt: RDF triple store with a SPARQL subset engine"};
  app.require_subcommand(1);

  LoadArgs load;
  auto* load_cmd = app.add_subcommand("load", "Load an N-Triples file into a store directory");
  load_cmd->add_option("dir", load.dir, "Store directory")->required();
  load_cmd->add_option("file", load.file, "N-Triples file")->required();
  load_cmd->add_flag("--force", load.force, "Overwrite a non-empty store directory");

  QueryArgs query;
  auto* query_cmd = app.add_subcommand("query", "Run a query file against a store and print TSV");
  query_cmd->add_option("paths", query.paths, "[store dir] query file (store dir defaults to $BITOPT_STORE)")
      ->required()
      ->expected(1, 2);
  query_cmd->add_flag("--explain", query.explain, "Print the plan report to stderr");
  query_cmd->add_flag("--oracle", query.oracle, "Evaluate with the brute-force reference evaluator");
  auto* no_prune = query_cmd->add_flag("--no-prune", query.no_prune, "Skip load-time and semi-join pruning");
  query_cmd->add_flag("--unsafe-order", query.unsafe_order, "Join patterns in textual order")->needs(no_prune);
  query_cmd->add_option("--nullify", query.nullify, "Nullification and best-match: auto, on or off")
      ->check(CLI::IsMember({"auto", "on", "off"}));
  query_cmd->add_option("--best-match", query.best_match, "Subsumed-row removal: auto, on or off")
      ->check(CLI::IsMember({"auto", "on", "off"}));
  query_cmd->add_option("--dot", query.dot, "Write GoSN and GoT of the first disjunct to PREFIX.{gosn,got}.dot");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*load_cmd) return cmd_load(load);
    return cmd_query(query);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
