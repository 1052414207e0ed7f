#pragma once

#include <vector>

#include "bitopt/query.hpp"

namespace bitopt {

struct UnfResult {
  std::vector<NodePtr> disjuncts;  // each UNION-free
  bool rule3_used = false;         // some P1 ⟕ (P2 ∪ P3) was split
};

/// Union normal form. Filters over a union are distributed to every branch.
UnfResult to_unf(const NodePtr& root);

/// Pushes filter conjuncts into the required side of left joins when that side binds
/// all of the conjunct's variables. Nested filters are merged.
NodePtr push_filters(const NodePtr& root);

}  // namespace bitopt
