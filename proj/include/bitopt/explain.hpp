#pragma once

#include <string>

#include "bitopt/executor.hpp"

namespace bitopt {

/// Line-oriented `key=value` plan report with `[section]` headers. Starts with
/// `explain_version=1`; later additions only append keys.
std::string explain(const Query& q, const QueryRun& run);
/// The structural part for one UNION-free pattern (no load or join details).
std::string explain_structure(const QueryStructure& qs);

std::string gosn_dot(const QueryStructure& qs);
std::string got_dot(const QueryStructure& qs);

}  // namespace bitopt
