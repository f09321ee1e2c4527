// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lioulab/solve.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lioulab {

/// Smooth surrogate potentials with the prescribed N^-alpha tail. The
/// gradient-weighted family matches |nabla_X N|^2 N^-alpha asymptotically
/// and stays smooth through the origin; the plain family matches N^-alpha.
enum class QFamily { grad_weighted, plain };

ScalarExpr heisenberg_surrogate_potential(int m, double alpha, QFamily family);
ScalarExpr grushin_surrogate_potential(double alpha);

struct InvadingConfig {
    std::string preset = "heisenberg";  // "heisenberg" or "grushin"
    int m = 1;                          // heisenberg order
    double alpha = 3.0;
    double gamma = 1.0;
    QFamily q_family = QFamily::grad_weighted;
    std::vector<int> ladder = {2, 4, 8};
    double h = 0.125;
    SolveOptions solver = [] {
        SolveOptions o;
        o.tol = 1e-11;
        return o;
    }();
    AssembleOptions assemble_opts;
    bool keep_solutions = true;
};

struct RungDiagnostics {
    int j = 0;
    std::int64_t unknowns = 0;
    double center = 0.0;
    double min_value = 0.0;
    double max_value = 0.0;
    /// max over nodes of the violation of 0 <= u <= gamma.
    double bound_defect = 0.0;
    /// max over common nodes of u_j - u_prev (positive part).
    double monotonicity_defect = 0.0;
    SolveReport solve;
    // t = 0 slice ring statistics (heisenberg preset only).
    std::vector<double> ring_radii, ring_mean, ring_min, ring_max;
};

struct InvadingRun {
    InvadingConfig config;
    std::vector<RungDiagnostics> rungs;
    std::vector<GridField> solutions;  // kept when config.keep_solutions
    double limit_estimate = 0.0;       // Aitken-extrapolated center value
};

/// Solves the Dirichlet ladder u = gamma on the boundary of (-j,j)^n for
/// every rung, with each solve warm-started from the previous rung.
/// Throws std::runtime_error when a rung fails to converge.
InvadingRun invading_run(const InvadingConfig& cfg);

struct BarrierSpec {
    enum class Variant { cylindrical, radial };
    Variant variant = Variant::radial;
    double amplitude = 1.0;  // A
    double beta = 0.5;
    double r0 = 1.0;         // cutoff radius (in rho for cylindrical, N for radial)
};

/// Admissible exponent windows: cylindrical 0 < beta < min(2m-2, alpha-2),
/// radial 0 < beta < min(alpha-2, 2).
bool barrier_window_valid(const BarrierSpec& b, int m, double alpha,
                          std::string* detail = nullptr);

struct BarrierReport {
    bool ok = false;              // Delta V + Q <= 0 at all samples
    double max_violation = 0.0;   // max of Delta V + Q
    double a_min = 0.0;           // smallest amplitude working on the samples
    int sample_count = 0;
};

/// Evaluates Delta_{H^m} V at the samples: closed radial identity
/// f'' + (2m-1) f'/rho for the cylindrical variant, symbolic horizontal
/// second derivatives for the radial one. All samples must lie outside the
/// cutoff. Requires a valid exponent window.
BarrierReport barrier_check(const BarrierSpec& b, int m, double alpha, const ScalarExpr& q,
                            std::span<const std::vector<double>> points);

/// Low-discrepancy samples outside the cutoff, within reach*r0.
std::vector<std::vector<double>> sample_outside_cutoff(const BarrierSpec& b, int m, int count,
                                                       std::uint64_t seed, double reach = 8.0);

struct Step2Report {
    bool applicable = false;  // exponent window valid for this run
    bool skipped = false;     // delta preconditions not met
    std::string detail;
    bool pass = false;
    double min_w = 0.0;       // worst node value of u_j - gamma + delta V
    double tol = 0.0;
    std::int64_t nodes_checked = 0;
};

/// Certifies the lower bound u_j >= gamma - delta V at grid nodes outside
/// the cutoff for every rung, given delta >= gamma and delta >= gamma/V(R0).
/// Default tolerance 0.02 * gamma absorbs the discretization error of u_j.
Step2Report step2_certificate(const InvadingRun& run, const BarrierSpec& b, double delta,
                              double tol = 0.0);

}  // namespace lioulab
