#pragma once

#include <json.hpp>

#include "ontopt/classify.hpp"
#include "ontopt/problem.hpp"

namespace ontopt {

using Json = nlohmann::ordered_json;

Json problem_to_json(const Problem& p);

/// Per-row LP multipliers → inequality_system() alignment (equality ν split
/// into its h, −h pair).
Vec expand_equality_multipliers(const LpData& lp, const Vec& duals);

}  // namespace ontopt
