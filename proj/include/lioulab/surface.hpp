// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "lioulab/frame.hpp"
#include "lioulab/montecarlo.hpp"
#include "lioulab/norms.hpp"

#include <cstdint>
#include <vector>

namespace lioulab {

/// Monte Carlo estimate of F(r) = int_{N<r} |nabla_X N|^2 dx over the
/// bounding box of the sublevel set, stratified with a fixed seed.
/// Points where the gradient of N is undefined contribute 0.
McEstimate volume_functional(const Frame& f, const ExhaustionNorm& norm, double r,
                             std::uint64_t samples, std::uint64_t seed, int threads = 0);

/// S(r) ~ (F(r+delta) - F(r-delta)) / (2 delta) by the coarea identity;
/// both volumes share the sample stream (common random numbers), so the
/// difference estimator stays tight. delta <= 0 selects the default r/50.
/// Throws std::runtime_error when the propagated Monte Carlo error exceeds
/// 20% of the estimate.
McEstimate surface_factor(const Frame& f, const ExhaustionNorm& norm, double r,
                          std::uint64_t samples, std::uint64_t seed, double delta = 0.0,
                          int threads = 0);

struct SurfaceFactorEstimate {
    std::vector<double> r;
    std::vector<double> s;
    std::vector<double> stderr_;
};

/// Runs surface_factor over an increasing list of radii; radius i uses the
/// substream (seed, i) so estimates are independent across radii.
SurfaceFactorEstimate surface_scan(const Frame& f, const ExhaustionNorm& norm,
                                   const std::vector<double>& r_values, std::uint64_t samples,
                                   std::uint64_t seed, int threads = 0);

struct PowerLawFit {
    double exponent = 0.0;
    double log_constant = 0.0;
};

/// Least-squares fit of log S against log r. Requires >= 4 radii spanning
/// at least one octave and positive estimates.
PowerLawFit power_law_fit(const SurfaceFactorEstimate& e);

}  // namespace lioulab
