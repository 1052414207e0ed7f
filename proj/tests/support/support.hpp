#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "bitopt/executor.hpp"
#include "bitopt/query.hpp"
#include "bitopt/store.hpp"
#include "bitopt/structure.hpp"
#include "bitopt/working.hpp"

namespace bitopt::testing {

std::filesystem::path data_dir();
std::string read_file(const std::filesystem::path& path);

std::string ex(std::string_view local);  // full IRI in the default prefix
TripleStore store_from(std::string_view ntriples);
TripleStore seinfeld();
TripleStore movies();
Query query_file(std::string_view name);

using Table = std::vector<std::vector<std::string>>;

/// Rows rendered as display strings, NULL as "", sorted.
Table render(const ResultSet& rs, const Dictionary& dict);
/// Same, with the header permuted to `vars` first.
Table render_as(const ResultSet& rs, const std::vector<std::string>& vars, const Dictionary& dict);
/// Rows of prefixed-name cells, e.g. {":Julia", ""} for (:Julia, NULL).
Table table(std::initializer_list<std::vector<std::string>> rows);

/// Reference minimum union: dedup plus removal of rows subsumed by another row.
Table minimum_union(Table rows);

/// Leaf elimination tried over every removal order: a node may go when its edges to the
/// remaining nodes fall into at most one class of the label subset relation.
bool reference_acyclic(const GoT& got);

using PairSet = std::set<std::pair<std::uint32_t, std::uint32_t>>;

/// Per pattern, the working-BitMat coordinates that some oracle row uses. A row uses a
/// pattern when every pattern of its group and of each master group is bound to a
/// stored triple.
/// Meant for filter-free, UNION-free queries.
std::vector<PairSet> witnessed(const QueryStructure& qs, const std::vector<WorkingPattern>& wps,
                               const ResultSet& oracle_rows, const TripleStore& store);

struct QueryShape {
  int max_patterns = 6;
  bool optional = true;
  bool unions = true;
  bool filters = true;
  bool distinct = false;
  bool project_subset = true;
};

/// Small random stores and well-designed, connected queries over them.
class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(seed) {}

  std::string store_text(int max_triples = 40);
  std::string query_text(const QueryShape& shape);
  /// A query that parses and whose UNF disjuncts are all connected.
  Query query(const QueryShape& shape, std::string* text = nullptr);

  std::mt19937_64& rng() { return rng_; }
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

 private:
  struct Scope;
  std::string group(Scope& scope, int& budget, int depth);
  std::string term(Scope& scope, bool connect, std::vector<std::string>& bound);
  std::string filter(const std::vector<std::string>& vars);

  std::mt19937_64 rng_;
  int fresh_ = 0;
  bool optional_ = true, unions_ = true, filters_ = true;
};

}  // namespace bitopt::testing
