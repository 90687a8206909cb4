#pragma once

#include <string>

#include "json.hpp"

#include "gmopt/constraints.hpp"
#include "gmopt/gmp.hpp"
#include "gmopt/lp.hpp"
#include "gmopt/measures.hpp"
#include "gmopt/monotonicity.hpp"

namespace gmopt {

/// JSON encodings used by the command-line tools; schemas are documented in
/// docs/formats.md. All readers throw std::invalid_argument on schema
/// violations (missing keys, wrong types, bad values); underlying construction
/// errors propagate unchanged.

nlohmann::json distribution_to_json(const DiscreteDistribution& d);
DiscreteDistribution distribution_from_json(const nlohmann::json& j);

nlohmann::json measure_to_json(const DiscreteMeasure& m);
DiscreteMeasure measure_from_json(const nlohmann::json& j);

nlohmann::json test_function_to_json(const TestFunction& f);
TestFunction test_function_from_json(const nlohmann::json& j);

/// A family is an array; each entry is either one test function or a group
/// that expands against the grid:
///   {"kind": "multi_marginal", "marginals": [...]}  (one per axis)
///   {"kind": "martingale"}
nlohmann::json family_to_json(const ConstraintFamily& family);
ConstraintFamily family_from_json(const nlohmann::json& j,
                                  const std::vector<GroundPoint>& grid);

nlohmann::json cost_to_json(const CostSpec& cost);
CostSpec cost_from_json(const nlohmann::json& j);

nlohmann::json concave_fn_to_json(const ConcaveFn& h);
ConcaveFn concave_fn_from_json(const nlohmann::json& j);

/// Instance: {"grid": [[...], ...], "cost": {...}, "family": [...]}.
nlohmann::json instance_to_json(const GmpInstance& instance);
GmpInstance instance_from_json(const nlohmann::json& j);

/// Solution JSON carries the plan, objective, residuals, diagnostic, the
/// solved LP, and its result, so certificates re-verify without re-solving.
nlohmann::json solution_to_json(const Solution& solution);
Solution solution_from_json(const nlohmann::json& j);

nlohmann::json lp_to_json(const LinearProgram& lp);
LinearProgram lp_from_json(const nlohmann::json& j);

nlohmann::json lp_result_to_json(const LpResult& result);
LpResult lp_result_from_json(const nlohmann::json& j);

nlohmann::json verdict_to_json(const Verdict& verdict);

/// Plan CSV: header x1,...,xn,mass then one atom per row.
std::string plan_to_csv(const TransportPlan& plan);

}  // namespace gmopt
