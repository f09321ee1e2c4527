// SPDX-License-Identifier: Apache-2.0
#include "lioulab/json_io.hpp"

#include <algorithm>
#include <cmath>

namespace lioulab {

void check_keys(const Json& obj, const std::vector<std::string>& required,
                const std::vector<std::string>& optional, const std::string& context) {
    if (!obj.is_object()) throw ConfigError(context + ": expected a JSON object");
    for (const auto& key : required) {
        if (!obj.contains(key)) throw ConfigError(context + ": missing required key '" + key + "'");
    }
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::find(required.begin(), required.end(), key) == required.end() &&
            std::find(optional.begin(), optional.end(), key) == optional.end())
            throw ConfigError(context + ": unknown key '" + key + "'");
    }
}

Json frame_to_json(const Frame& f) {
    Json j;
    j["n"] = f.dim();
    j["weights"] = f.weights().sigma();
    Json fields = Json::array();
    for (const auto& field : f.fields()) {
        Json coeffs = Json::array();
        for (const auto& c : field.coeffs()) coeffs.push_back(c.to_string());
        fields.push_back(coeffs);
    }
    j["fields"] = fields;
    return j;
}

Frame frame_from_json(const Json& j, bool validated) {
    if (j.is_string()) return frame_preset(j.get<std::string>());
    if (j.contains("preset")) {
        check_keys(j, {"preset"}, {}, "frame");
        return frame_preset(j["preset"].get<std::string>());
    }
    if (j.contains("group_law")) {
        // Polynomial group law (product polynomials in 2n variables) plus
        // dilation weights; the frame is the degree-1 part of the Jacobian
        // basis, i.e. a basis of the horizontal layer.
        check_keys(j, {"group_law", "weights"}, {}, "frame");
        const Json& g = j["group_law"];
        check_keys(g, {"n", "product"}, {}, "group_law");
        const int n = g["n"].get<int>();
        std::vector<Polynomial> product;
        for (const auto& s : g["product"])
            product.push_back(parse_polynomial(s.get<std::string>(), 2 * n));
        const GroupLaw law(n, std::move(product));
        DilationWeights weights(j["weights"].get<std::vector<int>>());
        std::vector<PolyVectorField> horizontal;
        for (const auto& f : jacobian_basis(law)) {
            const auto d = homogeneity_degree(f, weights);
            if (d.kind == HomogeneityDegree::Kind::value && d.degree == 1)
                horizontal.push_back(f);
        }
        if (horizontal.size() < 2)
            throw ConfigError("group_law frame: fewer than 2 degree-1 Jacobian fields");
        if (validated) return Frame(std::move(horizontal), std::move(weights));
        return Frame(Frame::Unchecked{}, std::move(horizontal), std::move(weights));
    }
    check_keys(j, {"n", "weights", "fields"}, {}, "frame");
    const int n = j["n"].get<int>();
    DilationWeights weights(j["weights"].get<std::vector<int>>());
    std::vector<PolyVectorField> fields;
    for (const auto& fj : j["fields"]) {
        fields.push_back(parse_vector_field(fj.get<std::vector<std::string>>(), n));
    }
    if (validated) return Frame(std::move(fields), std::move(weights));
    return Frame(Frame::Unchecked{}, std::move(fields), std::move(weights));
}

Json norm_to_json(const ExhaustionNorm& n) {
    Json j;
    j["expr"] = n.expr.to_string();
    j["weights"] = n.weights.sigma();
    j["unit_box"] = n.unit_box;
    j["singular_hint"] = n.singular_set_hint;
    return j;
}

namespace {

// Bounding half-width of {N < 1} along axis j, assuming N is nondecreasing
// in each |x_j|: bisection on N(s e_j) = 1.
double axis_bound(const ScalarExpr& expr, int n, int j) {
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    auto value = [&](double s) {
        x[static_cast<std::size_t>(j)] = s;
        return expr.eval(x);
    };
    double hi = 1.0;
    int guard = 0;
    while (value(hi) < 1.0) {
        hi *= 2.0;
        if (++guard > 200) throw std::runtime_error("norm does not reach 1 along an axis");
    }
    double lo = 0.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (value(mid) < 1.0 ? lo : hi) = mid;
    }
    return hi;
}

}  // namespace

ExhaustionNorm norm_from_json(const Json& j) {
    if (j.is_string()) return norm_preset(j.get<std::string>());
    if (j.contains("preset")) {
        check_keys(j, {"preset"}, {}, "norm");
        return norm_preset(j["preset"].get<std::string>());
    }
    check_keys(j, {"expr", "weights"}, {"unit_box", "singular_hint"}, "norm");
    DilationWeights weights(j["weights"].get<std::vector<int>>());
    const int n = weights.dim();
    ExhaustionNorm norm{parse_scalar_expr(j["expr"].get<std::string>(), n), weights,
                        j.value("singular_hint", std::string{}), {}};
    if (j.contains("unit_box")) {
        norm.unit_box = j["unit_box"].get<std::vector<double>>();
        if (static_cast<int>(norm.unit_box.size()) != n)
            throw ConfigError("norm: unit_box size mismatch");
    } else {
        for (int a = 0; a < n; ++a) norm.unit_box.push_back(axis_bound(norm.expr, n, a));
    }
    return norm;
}

ScalarExpr potential_from_json(const Json& j, const Frame& frame) {
    if (j.is_string()) return parse_scalar_expr(j.get<std::string>(), frame.dim());
    check_keys(j, {"preset"}, {"alpha", "family", "m"}, "potential");
    const std::string preset = j["preset"].get<std::string>();
    const double alpha = j.value("alpha", 2.0);
    const int m = j.value("m", frame.generators() / 2);
    if (preset == "gradweight_tail") {
        const std::string frame_name =
            frame.dim() == 2 ? "grushin" : ("heisenberg:" + std::to_string(m));
        return gradweight_tail_potential(frame_name, alpha);
    }
    if (preset == "hmwithb") return hmwithb_potential(m, alpha);
    if (preset == "surrogate") {
        const std::string family = j.value("family", std::string("grad_weighted"));
        if (frame.dim() == 2) return grushin_surrogate_potential(alpha);
        return heisenberg_surrogate_potential(
            m, alpha, family == "plain" ? QFamily::plain : QFamily::grad_weighted);
    }
    throw ConfigError("unknown potential preset '" + preset + "'");
}

std::vector<ScalarExpr> drift_from_json(const Json& j, const Frame& frame) {
    if (j.is_null()) return {};
    if (j.is_array()) {
        std::vector<ScalarExpr> out;
        for (const auto& e : j) out.push_back(parse_scalar_expr(e.get<std::string>(), frame.dim()));
        if (!out.empty() && static_cast<int>(out.size()) != frame.generators())
            throw ConfigError("drift needs one expression per generator");
        return out;
    }
    check_keys(j, {"preset"}, {"beta", "m"}, "drift");
    if (j["preset"].get<std::string>() != "hmwithb")
        throw ConfigError("unknown drift preset");
    const int m = j.value("m", frame.generators() / 2);
    return hmwithb_drift(m, j.value("beta", 1.0));
}

namespace {

Json witness_to_json(const Witness& w) {
    Json j;
    j["point"] = w.point;
    j["value"] = w.value;
    return j;
}

}  // namespace

Json criterion_report_to_json(const CriterionReport& rep) {
    Json j;
    j["S"] = {{"ok", rep.s.ok},
              {"min_Q", rep.s.min_q},
              {"max_Q", rep.s.max_q},
              {"worst", witness_to_json(rep.s.worst)}};
    j["G_far"] = {{"ok", rep.g_far.ok},
                  {"q_bound_ok", rep.g_far.q_bound_ok},
                  {"drift_bound_ok", rep.g_far.drift_bound_ok},
                  {"drift_free", rep.g_far.drift_free},
                  {"kappa_est", rep.g_far.kappa_est},
                  {"ring_kappa", rep.g_far.ring_kappa},
                  {"worst_q_margin", witness_to_json(rep.g_far.worst_q)},
                  {"worst_drift_ratio", witness_to_json(rep.g_far.worst_drift)}};
    j["G_near"] = {{"ok", rep.g_near.ok},
                   {"drift_free", rep.g_near.drift_free},
                   {"kappa_est", rep.g_near.kappa_est},
                   {"worst", witness_to_json(rep.g_near.worst)}};
    Json integral;
    integral["verdict"] = to_string(rep.integral.verdict);
    integral["numeric_verdict"] = to_string(rep.integral.numeric_verdict);
    integral["fast_path"] = rep.integral.fast_path;
    if (rep.integral.fast_path && std::isfinite(rep.integral.alpha))
        integral["alpha"] = rep.integral.alpha;
    integral["s_power"] = rep.integral.s_power;
    integral["s_constant"] = rep.integral.s_constant;
    integral["rule"] = rep.integral.rule;
    j["integral"] = integral;
    j["overall"] = to_string(rep.overall);
    j["r_max"] = rep.r_max;
    j["note"] = "verdicts are sample-limited: (G) is checked on the annulus up to r_max only";
    return j;
}

Json solve_report_to_json(const SolveReport& rep) {
    return Json{{"converged", rep.converged},
                {"iterations", rep.iterations},
                {"residual", rep.residual},
                {"target", rep.target},
                {"method", rep.method}};
}

Json invading_run_to_json(const InvadingRun& run) {
    Json rungs = Json::array();
    for (const auto& r : run.rungs) {
        Json jr;
        jr["j"] = r.j;
        jr["unknowns"] = r.unknowns;
        jr["center"] = r.center;
        jr["min"] = r.min_value;
        jr["max"] = r.max_value;
        jr["bound_defect"] = r.bound_defect;
        jr["monotonicity_defect"] = r.monotonicity_defect;
        jr["solve"] = solve_report_to_json(r.solve);
        if (!r.ring_radii.empty()) {
            jr["ring_radii"] = r.ring_radii;
            jr["ring_mean"] = r.ring_mean;
            jr["ring_min"] = r.ring_min;
            jr["ring_max"] = r.ring_max;
        }
        rungs.push_back(jr);
    }
    Json j;
    j["rungs"] = rungs;
    j["limit_estimate"] = run.limit_estimate;
    j["gamma"] = run.config.gamma;
    j["alpha"] = run.config.alpha;
    return j;
}

Json barrier_report_to_json(const BarrierReport& rep) {
    return Json{{"ok", rep.ok},
                {"max_violation", rep.max_violation},
                {"a_min", rep.a_min},
                {"samples", rep.sample_count}};
}

Json step2_report_to_json(const Step2Report& rep) {
    return Json{{"applicable", rep.applicable}, {"skipped", rep.skipped},
                {"detail", rep.detail},         {"pass", rep.pass},
                {"min_w", rep.min_w},           {"tol", rep.tol},
                {"nodes_checked", rep.nodes_checked}};
}

}  // namespace lioulab
