#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bitopt/query.hpp"

namespace bitopt {

enum class Truth { False, True, Unknown };

/// Resolves a variable to its bound term, or nullptr when the variable is NULL.
using Lookup = std::function<const Term*(const std::string&)>;

/// Kleene three-valued evaluation. Comparisons against NULL or across types are Unknown;
/// IRIs support only = and !=.
Truth eval_filter(const FilterExpr& expr, const Lookup& lookup);
Truth compare_terms(CmpOp op, const Term& a, const Term& b);

/// Top-level AND operands, left to right.
std::vector<FilterExpr> conjuncts(const FilterExpr& expr);
/// Left-deep AND of the given conjuncts; nullopt when empty.
std::optional<FilterExpr> conjoin(const std::vector<FilterExpr>& parts);

struct FilterSplit {
  std::vector<FilterExpr> load_time;  // single-variable top-level conjuncts
  std::vector<FilterExpr> residual;
};

FilterSplit classify_loadtime_filters(const FilterExpr& expr);

}  // namespace bitopt
