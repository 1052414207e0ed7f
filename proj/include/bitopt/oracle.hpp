#pragma once

#include <cstddef>

#include "bitopt/executor.hpp"
#include "bitopt/store.hpp"

namespace bitopt {

struct OracleOptions {
  std::size_t row_limit = 10000;  // any intermediate result above this throws Error(Limit)
};

/// Textbook algebra over the raw triple list: nested-loop BGPs, null-compatible joins,
/// left joins padded with NULL, union-all, and filters that keep only True rows.
/// Rows range over vars(root) in node space.
ResultSet oracle_full(const NodePtr& root, const TripleStore& store, const OracleOptions& opts = {});

/// Projection of oracle_full; DISTINCT drops duplicate rows and nothing else.
ResultSet oracle_eval(const Query& q, const TripleStore& store, const OracleOptions& opts = {});

}  // namespace bitopt
