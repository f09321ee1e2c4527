// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lioulab/frame.hpp"
#include "lioulab/norms.hpp"
#include "lioulab/surface.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <variant>
#include <vector>

namespace lioulab {

/// The operator L = sum X_i^2 + sum b_i X_i - Q of the model equation.
/// An empty drift vector means b = 0. Note that under hypothesis (G) a
/// potential Q = 0 forces b = 0, reducing L to the plain sum of squares.
struct OperatorSpec {
    Frame frame;
    std::vector<ScalarExpr> drift;
    ScalarExpr potential;

    OperatorSpec(Frame f, std::vector<ScalarExpr> b, ScalarExpr q);
};

struct SamplingPlan {
    std::uint64_t seed = 0;
    int near_count = 2048;       // points in {N <= rho0} (and {N <= 2 rho0} for (S))
    int ring_count = 256;        // points per dyadic ring
    int rings = 10;              // R_max = rho0 * 2^rings
    double singular_radius = 1e-6;
    std::vector<std::vector<double>> singular_points;  // defaults to {origin}
};

struct CriterionConfig {
    ExhaustionNorm norm;
    double rho0 = 1.0;
    ScalarExpr q_hat;  // one variable t, continuous, >= 0 and not identically 0 on (rho0, inf)
    double kappa = 1.0;
    double lambda = 1.0;
    SamplingPlan sampling;
};

struct Witness {
    std::vector<double> point;
    double value = 0.0;
};

struct CheckSReport {
    bool ok = false;
    double min_q = 0.0;
    double max_q = 0.0;
    Witness worst;  // the most negative Q sample
};

struct GFarReport {
    bool ok = false;
    bool q_bound_ok = false;
    bool drift_bound_ok = false;
    bool drift_free = false;
    double kappa_est = 0.0;           // smallest kappa working on the samples
    std::vector<double> ring_kappa;   // per dyadic ring, for divergence diagnostics
    Witness worst_q;                  // min of Q - psi*qhat(N)
    Witness worst_drift;              // max of LHS/RHS
};

struct GNearReport {
    bool ok = false;
    bool drift_free = false;
    double kappa_est = 0.0;
    Witness worst;
};

enum class IntegralVerdict { divergent, convergent, undetermined };

const char* to_string(IntegralVerdict v);

struct PowerLawS {
    double constant = 1.0;  // S(r) = constant * r^power
    double power = 0.0;
};

/// S(r) model for the divergence integral: closed-form power law or a
/// sampled estimate (reduced to a power law by least squares).
using SModel = std::variant<PowerLawS, SurfaceFactorEstimate>;

struct IntegralReport {
    IntegralVerdict verdict = IntegralVerdict::undetermined;
    bool fast_path = false;  // closed form for qhat = c t^-alpha, S = c r^p
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double s_power = 0.0;
    double s_constant = 0.0;
    IntegralVerdict numeric_verdict = IntegralVerdict::undetermined;
    std::string rule;                    // which decision rule fired
    std::vector<double> ladder_log_increment;  // log of per-octave increments
};

struct CriterionReport {
    CheckSReport s;
    GFarReport g_far;
    GNearReport g_near;
    IntegralReport integral;
    enum class Overall { liouville_holds, inconclusive } overall = Overall::inconclusive;
    double r_max = 0.0;  // the sampled annulus is finite; verdicts are sample-limited
};

const char* to_string(CriterionReport::Overall o);

/// Cached cumulative integral r -> int_{rho0}^r sqrt(qhat); trapezoid on a
/// log grid with monotone linear interpolation between grid points.
class SqrtQhatIntegral {
  public:
    SqrtQhatIntegral(const ScalarExpr& q_hat, double rho0, double r_top,
                     int points_per_octave = 64);
    double operator()(double r) const;
    double r_top() const { return r_top_; }

  private:
    double rho0_, r_top_, du_;
    std::vector<double> cum_;
};

/// Deterministic low-discrepancy samples of {N <= rho} minus the declared
/// singular balls.
std::vector<std::vector<double>> sample_ball(const ExhaustionNorm& norm, double rho, int count,
                                             const SamplingPlan& plan);

struct AnnulusSamples {
    std::vector<std::vector<std::vector<double>>> rings;  // ring k: N in (rho0 2^k, rho0 2^{k+1}]
    double r_max = 0.0;
};

AnnulusSamples sample_annulus(const ExhaustionNorm& norm, double rho0, const SamplingPlan& plan);

/// (S): Q >= 0 and Q not identically 0, sampled. Requires >= 1000 points.
CheckSReport check_S(const OperatorSpec& spec, std::span<const std::vector<double>> points);

/// (G)-far on {N > rho0}: Q >= |nabla_X N|^2 qhat(N) and the drift bound
/// |b|^2 + (div_X b)_- <= kappa |nabla_X N|^2 (int_{rho0}^N sqrt(qhat))^2 qhat(N).
GFarReport check_G_far(const OperatorSpec& spec, const CriterionConfig& cfg,
                       const AnnulusSamples& samples);

/// (G)-near on {N <= rho0}: |b|^2 + (div_X b)_- <= kappa Q.
GNearReport check_G_near(const OperatorSpec& spec, const CriterionConfig& cfg,
                         std::span<const std::vector<double>> points);

/// Divergence classification of
/// int_rho0^inf S(r)^-1 exp(Lambda (int_rho0^r sqrt(qhat))^2) dr on the
/// dyadic ladder R_k = rho0 2^k, k <= 40, with the closed-form fast path
/// for the power-law family.
IntegralReport classify_integral(const SModel& s_model, const CriterionConfig& cfg);

/// Ladder-based numeric classification only (no fast path), used as the
/// cross-check route.
IntegralVerdict classify_integral_numeric(const PowerLawS& s, const CriterionConfig& cfg,
                                          std::vector<double>* log_increments = nullptr,
                                          std::string* rule = nullptr);

/// Full composition of the criterion checks. Never claims failure of the Liouville
/// property; a failed sub-check or non-divergent integral yields
/// "inconclusive".
CriterionReport liouville_check(const OperatorSpec& spec, const CriterionConfig& cfg,
                                const SModel& s_model);

}  // namespace lioulab
