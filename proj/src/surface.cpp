// SPDX-License-Identifier: Apache-2.0
#include "lioulab/surface.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace lioulab {

namespace {

int resolve_threads(int threads) {
    if (threads > 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

struct StratumAccum {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::uint64_t count = 0;
};

/// Runs fn(stratum) over all strata on a small pool; per-stratum results are
/// reduced in stratum order afterwards, so the outcome does not depend on
/// the thread count.
template <typename Fn>
void for_each_stratum(std::uint64_t num_strata, int threads, Fn&& fn) {
    threads = std::min<std::uint64_t>(static_cast<std::uint64_t>(resolve_threads(threads)),
                                      num_strata);
    if (threads <= 1) {
        for (std::uint64_t s = 0; s < num_strata; ++s) fn(s);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::uint64_t s = static_cast<std::uint64_t>(t); s < num_strata;
                 s += static_cast<std::uint64_t>(threads))
                fn(s);
        });
    }
    for (auto& th : pool) th.join();
}

std::uint64_t stratum_count(std::uint64_t samples) {
    return std::clamp<std::uint64_t>(samples / 256, 1, 4096);
}

struct BoxSpec {
    std::vector<double> halfwidth;
    double volume = 1.0;
};

BoxSpec bounding_box(const ExhaustionNorm& norm, double r) {
    BoxSpec box;
    box.halfwidth.resize(static_cast<std::size_t>(norm.dim()));
    for (int j = 0; j < norm.dim(); ++j) {
        box.halfwidth[static_cast<std::size_t>(j)] = norm.box_halfwidth(j, r);
        box.volume *= 2.0 * box.halfwidth[static_cast<std::size_t>(j)];
    }
    return box;
}

// |nabla_X N|^2 at x, with the convention that the integrand is 0 where the
// gradient of N is undefined (the declared singular set, measure zero).
double integrand_psi(const Frame& f, const ExhaustionNorm& norm, std::span<const double> x,
                     std::span<double> grad, std::span<double> field) {
    try {
        norm.expr.eval_grad(x, grad);
    } catch (const EvalDomainError&) {
        return 0.0;
    }
    double psi = 0.0;
    for (int i = 0; i < f.generators(); ++i) {
        f.field(i).evaluate(x, field);
        double d = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) d += field[j] * grad[j];
        psi += d * d;
    }
    return psi;
}

}  // namespace

McEstimate volume_functional(const Frame& f, const ExhaustionNorm& norm, double r,
                             std::uint64_t samples, std::uint64_t seed, int threads) {
    if (r <= 0.0) throw std::invalid_argument("volume_functional needs r > 0");
    if (samples < 1000) throw std::invalid_argument("volume_functional needs >= 1000 samples");
    if (norm.dim() != f.dim()) throw std::invalid_argument("norm/frame dimension mismatch");

    const BoxSpec box = bounding_box(norm, r);
    const std::uint64_t strata = stratum_count(samples);
    std::vector<StratumAccum> acc(strata);
    const int n = f.dim();

    for_each_stratum(strata, threads, [&](std::uint64_t s) {
        UniformStream rng(mix_seed(seed, s));
        const std::uint64_t count = samples / strata + (s < samples % strata ? 1 : 0);
        // Stratify along axis 0: slab s of K equal slices.
        const double w0 = 2.0 * box.halfwidth[0] / static_cast<double>(strata);
        const double lo0 = -box.halfwidth[0] + w0 * static_cast<double>(s);
        std::vector<double> x(static_cast<std::size_t>(n));
        std::vector<double> grad(static_cast<std::size_t>(n));
        std::vector<double> field(static_cast<std::size_t>(n));
        StratumAccum& a = acc[s];
        for (std::uint64_t k = 0; k < count; ++k) {
            x[0] = lo0 + w0 * rng.next();
            for (int j = 1; j < n; ++j)
                x[static_cast<std::size_t>(j)] =
                    rng.next(-box.halfwidth[static_cast<std::size_t>(j)],
                             box.halfwidth[static_cast<std::size_t>(j)]);
            double v = 0.0;
            if (norm.value(x) < r) v = integrand_psi(f, norm, x, grad, field);
            a.sum += v;
            a.sum_sq += v * v;
            a.count += 1;
        }
    });

    // Proportional allocation: estimate = vol * sum_s (w_s * mean_s) with
    // w_s = 1/K; variance adds per stratum.
    McEstimate out;
    double mean_acc = 0.0, var_acc = 0.0;
    for (const auto& a : acc) {
        if (a.count == 0) continue;
        const double mean = a.sum / static_cast<double>(a.count);
        const double var =
            std::max(0.0, a.sum_sq / static_cast<double>(a.count) - mean * mean);
        const double w = 1.0 / static_cast<double>(strata);
        mean_acc += w * mean;
        var_acc += w * w * var / static_cast<double>(a.count);
        out.samples += a.count;
    }
    out.value = box.volume * mean_acc;
    out.stderr_ = box.volume * std::sqrt(var_acc);
    return out;
}

McEstimate surface_factor(const Frame& f, const ExhaustionNorm& norm, double r,
                          std::uint64_t samples, std::uint64_t seed, double delta, int threads) {
    if (r <= 0.0) throw std::invalid_argument("surface_factor needs r > 0");
    if (samples < 1000) throw std::invalid_argument("surface_factor needs >= 1000 samples");
    if (delta <= 0.0) delta = r / 50.0;
    if (delta >= r) throw std::invalid_argument("differentiation step must satisfy delta < r");

    const double rp = r + delta, rm = r - delta;
    const BoxSpec boxp = bounding_box(norm, rp);
    const BoxSpec boxm = bounding_box(norm, rm);
    const std::uint64_t strata = stratum_count(samples);
    std::vector<StratumAccum> acc(strata);
    const int n = f.dim();

    for_each_stratum(strata, threads, [&](std::uint64_t s) {
        UniformStream rng(mix_seed(seed, s));
        const std::uint64_t count = samples / strata + (s < samples % strata ? 1 : 0);
        std::vector<double> u(static_cast<std::size_t>(n));
        std::vector<double> x(static_cast<std::size_t>(n));
        std::vector<double> grad(static_cast<std::size_t>(n));
        std::vector<double> field(static_cast<std::size_t>(n));
        StratumAccum& a = acc[s];
        const double w0 = 2.0 / static_cast<double>(strata);
        for (std::uint64_t k = 0; k < count; ++k) {
            // One unit sample drives both radii (common random numbers).
            u[0] = -1.0 + w0 * (static_cast<double>(s) + rng.next());
            for (int j = 1; j < n; ++j) u[static_cast<std::size_t>(j)] = rng.next(-1.0, 1.0);

            double fp = 0.0, fm = 0.0;
            for (int j = 0; j < n; ++j)
                x[static_cast<std::size_t>(j)] =
                    u[static_cast<std::size_t>(j)] * boxp.halfwidth[static_cast<std::size_t>(j)];
            if (norm.value(x) < rp) fp = boxp.volume * integrand_psi(f, norm, x, grad, field);
            for (int j = 0; j < n; ++j)
                x[static_cast<std::size_t>(j)] =
                    u[static_cast<std::size_t>(j)] * boxm.halfwidth[static_cast<std::size_t>(j)];
            if (norm.value(x) < rm) fm = boxm.volume * integrand_psi(f, norm, x, grad, field);

            const double v = (fp - fm) / (2.0 * delta);
            a.sum += v;
            a.sum_sq += v * v;
            a.count += 1;
        }
    });

    McEstimate out;
    double mean_acc = 0.0, var_acc = 0.0;
    for (const auto& a : acc) {
        if (a.count == 0) continue;
        const double mean = a.sum / static_cast<double>(a.count);
        const double var =
            std::max(0.0, a.sum_sq / static_cast<double>(a.count) - mean * mean);
        const double w = 1.0 / static_cast<double>(strata);
        mean_acc += w * mean;
        var_acc += w * w * var / static_cast<double>(a.count);
        out.samples += a.count;
    }
    out.value = mean_acc;
    out.stderr_ = std::sqrt(var_acc);
    if (out.stderr_ > 0.2 * std::abs(out.value))
        throw std::runtime_error("surface_factor: Monte Carlo error exceeds 20% of the estimate");
    return out;
}

SurfaceFactorEstimate surface_scan(const Frame& f, const ExhaustionNorm& norm,
                                   const std::vector<double>& r_values, std::uint64_t samples,
                                   std::uint64_t seed, int threads) {
    SurfaceFactorEstimate out;
    for (std::size_t i = 0; i < r_values.size(); ++i) {
        const McEstimate e =
            surface_factor(f, norm, r_values[i], samples, mix_seed(seed, 7000 + i), 0.0, threads);
        out.r.push_back(r_values[i]);
        out.s.push_back(e.value);
        out.stderr_.push_back(e.stderr_);
    }
    return out;
}

PowerLawFit power_law_fit(const SurfaceFactorEstimate& e) {
    const std::size_t k = e.r.size();
    if (k < 4) throw std::invalid_argument("power_law_fit needs at least 4 radii");
    for (std::size_t i = 0; i + 1 < k; ++i) {
        if (!(e.r[i] < e.r[i + 1]))
            throw std::invalid_argument("power_law_fit needs strictly increasing radii");
    }
    if (e.r.back() < 2.0 * e.r.front())
        throw std::invalid_argument("power_law_fit needs radii spanning at least one octave");
    for (double s : e.s) {
        if (!(s > 0.0)) throw std::domain_error("power_law_fit needs positive estimates");
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double x = std::log(e.r[i]);
        const double y = std::log(e.s[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double nk = static_cast<double>(k);
    const double denom = nk * sxx - sx * sx;
    PowerLawFit fit;
    fit.exponent = (nk * sxy - sx * sy) / denom;
    fit.log_constant = (sy - fit.exponent * sx) / nk;
    return fit;
}

}  // namespace lioulab
