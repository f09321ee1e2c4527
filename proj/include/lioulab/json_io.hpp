// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lioulab/criterion.hpp"
#include "lioulab/invading.hpp"
#include "lioulab/presets.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace lioulab {

using Json = nlohmann::json;

/// Malformed or unknown configuration content; the CLI maps it to exit 2.
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Rejects unknown keys and enforces required ones.
void check_keys(const Json& obj, const std::vector<std::string>& required,
                const std::vector<std::string>& optional, const std::string& context);

Json frame_to_json(const Frame& f);
/// {"preset": "grushin"|"heisenberg:<m>"} or
/// {"n":, "weights": [...], "fields": [[coeff strings], ...]}.
/// validated = false skips the (H1) validation (for checker commands).
Frame frame_from_json(const Json& j, bool validated = true);

Json norm_to_json(const ExhaustionNorm& n);
/// {"preset": "kaplan:<m>"|"grushin"} or
/// {"expr": "...", "weights": [...], "unit_box": [...]?, "singular_hint": ""?}.
/// A missing unit_box is estimated by per-axis bisection (valid for norms
/// that are nondecreasing in each |x_j|).
ExhaustionNorm norm_from_json(const Json& j);

/// Potential: expression string, or {"preset": name, ...params}. Presets:
/// "gradweight_tail" (alpha), "hmwithb" (alpha), "surrogate" (alpha, family).
ScalarExpr potential_from_json(const Json& j, const Frame& frame);

/// Drift: array of expression strings, or {"preset": "hmwithb", "beta": b}.
std::vector<ScalarExpr> drift_from_json(const Json& j, const Frame& frame);

Json criterion_report_to_json(const CriterionReport& rep);
Json invading_run_to_json(const InvadingRun& run);
Json barrier_report_to_json(const BarrierReport& rep);
Json step2_report_to_json(const Step2Report& rep);
Json solve_report_to_json(const SolveReport& rep);

}  // namespace lioulab
