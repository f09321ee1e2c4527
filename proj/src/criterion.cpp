// SPDX-License-Identifier: Apache-2.0
#include "lioulab/criterion.hpp"

#include "lioulab/montecarlo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace lioulab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sq(double v) { return v * v; }

/// |b|^2 + (div_X b)_- at x; 0 for an empty drift.
double drift_lhs(const OperatorSpec& spec, std::span<const double> x) {
    if (spec.drift.empty()) return 0.0;
    double b2 = 0.0;
    for (const auto& bi : spec.drift) b2 += sq(bi.eval(x));
    const double div = horizontal_divergence(spec.frame, spec.drift, x);
    return b2 + std::max(-div, 0.0);
}

}  // namespace

OperatorSpec::OperatorSpec(Frame f, std::vector<ScalarExpr> b, ScalarExpr q)
    : frame(std::move(f)), drift(std::move(b)), potential(std::move(q)) {
    if (!drift.empty() && static_cast<int>(drift.size()) != frame.generators())
        throw std::invalid_argument("drift needs one component per generator (or none)");
}

const char* to_string(IntegralVerdict v) {
    switch (v) {
        case IntegralVerdict::divergent: return "divergent";
        case IntegralVerdict::convergent: return "convergent";
        case IntegralVerdict::undetermined: return "undetermined";
    }
    return "?";
}

const char* to_string(CriterionReport::Overall o) {
    return o == CriterionReport::Overall::liouville_holds ? "liouville_holds" : "inconclusive";
}

SqrtQhatIntegral::SqrtQhatIntegral(const ScalarExpr& q_hat, double rho0, double r_top,
                                   int points_per_octave) {
    if (rho0 <= 0.0 || r_top <= rho0) throw std::invalid_argument("bad integral range");
    rho0_ = rho0;
    r_top_ = r_top;
    const double octaves = std::log2(r_top / rho0);
    const int m = std::max(2, static_cast<int>(std::ceil(octaves * points_per_octave)));
    du_ = std::log(r_top / rho0) / m;
    cum_.resize(static_cast<std::size_t>(m) + 1);
    cum_[0] = 0.0;
    double q_max = 0.0;
    auto integrand = [&](double u) {
        const double t = rho0 * std::exp(u);
        const double q = q_hat.eval(std::span<const double>(&t, 1));
        if (q < -1e-12) throw std::domain_error("q_hat is negative on the integration range");
        q_max = std::max(q_max, q);
        return std::sqrt(std::max(q, 0.0)) * t;  // dt = t du
    };
    double prev = integrand(0.0);
    for (int i = 1; i <= m; ++i) {
        const double cur = integrand(du_ * i);
        cum_[static_cast<std::size_t>(i)] =
            cum_[static_cast<std::size_t>(i - 1)] + 0.5 * (prev + cur) * du_;
        prev = cur;
    }
    if (q_max <= 1e-12)
        throw std::domain_error("q_hat is identically zero on the integration range");
}

double SqrtQhatIntegral::operator()(double r) const {
    if (r <= rho0_) return 0.0;
    const double u = std::log(r / rho0_);
    const double pos = u / du_;
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= cum_.size()) return cum_.back();
    const double frac = pos - static_cast<double>(i);
    return cum_[i] * (1.0 - frac) + cum_[i + 1] * frac;
}

namespace {

bool near_singular(const SamplingPlan& plan, std::span<const double> x) {
    for (const auto& s : plan.singular_points) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) d2 += sq(x[j] - (j < s.size() ? s[j] : 0.0));
        if (d2 <= sq(plan.singular_radius)) return true;
    }
    return false;
}

SamplingPlan with_default_singularities(const SamplingPlan& plan, int n) {
    SamplingPlan p = plan;
    if (p.singular_points.empty())
        p.singular_points.push_back(std::vector<double>(static_cast<std::size_t>(n), 0.0));
    return p;
}

}  // namespace

std::vector<std::vector<double>> sample_ball(const ExhaustionNorm& norm, double rho, int count,
                                             const SamplingPlan& plan_in) {
    const int n = norm.dim();
    const SamplingPlan plan = with_default_singularities(plan_in, n);
    HaltonSequence seq(n, plan.seed);
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<std::size_t>(count));
    std::vector<double> u(static_cast<std::size_t>(n));
    std::vector<double> x(static_cast<std::size_t>(n));
    const long cap = 100000L * count;
    long tries = 0;
    while (static_cast<int>(out.size()) < count) {
        if (++tries > cap) throw std::runtime_error("ball sampler rejection cap exceeded");
        seq.next(u);
        for (int j = 0; j < n; ++j) {
            const double hw = norm.box_halfwidth(j, rho);
            x[static_cast<std::size_t>(j)] = (2.0 * u[static_cast<std::size_t>(j)] - 1.0) * hw;
        }
        if (norm.value(x) > rho) continue;
        if (near_singular(plan, x)) continue;
        out.push_back(x);
    }
    return out;
}

AnnulusSamples sample_annulus(const ExhaustionNorm& norm, double rho0,
                              const SamplingPlan& plan_in) {
    const int n = norm.dim();
    const SamplingPlan plan = with_default_singularities(plan_in, n);
    AnnulusSamples out;
    out.r_max = rho0 * std::pow(2.0, plan.rings);
    out.rings.resize(static_cast<std::size_t>(plan.rings));
    std::vector<double> u(static_cast<std::size_t>(n));
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int k = 0; k < plan.rings; ++k) {
        const double lo = rho0 * std::pow(2.0, k);
        const double hi = rho0 * std::pow(2.0, k + 1);
        HaltonSequence seq(n, mix_seed(plan.seed, 100 + static_cast<std::uint64_t>(k)));
        auto& ring = out.rings[static_cast<std::size_t>(k)];
        ring.reserve(static_cast<std::size_t>(plan.ring_count));
        const long cap = 100000L * plan.ring_count;
        long tries = 0;
        while (static_cast<int>(ring.size()) < plan.ring_count) {
            if (++tries > cap) throw std::runtime_error("annulus sampler rejection cap exceeded");
            seq.next(u);
            for (int j = 0; j < n; ++j) {
                const double hw = norm.box_halfwidth(j, hi);
                x[static_cast<std::size_t>(j)] = (2.0 * u[static_cast<std::size_t>(j)] - 1.0) * hw;
            }
            const double nv = norm.value(x);
            if (nv <= lo || nv > hi) continue;
            ring.push_back(x);
        }
    }
    return out;
}

CheckSReport check_S(const OperatorSpec& spec, std::span<const std::vector<double>> points) {
    if (points.size() < 1000)
        throw std::invalid_argument("check_S needs at least 1000 sample points");
    CheckSReport rep;
    rep.min_q = kInf;
    rep.max_q = -kInf;
    for (const auto& p : points) {
        const double q = spec.potential.eval(p);
        if (q < rep.min_q) {
            rep.min_q = q;
            rep.worst = {p, q};
        }
        rep.max_q = std::max(rep.max_q, q);
    }
    rep.ok = rep.min_q >= -1e-12 && rep.max_q > 1e-12;
    return rep;
}

GFarReport check_G_far(const OperatorSpec& spec, const CriterionConfig& cfg,
                       const AnnulusSamples& samples) {
    GFarReport rep;
    rep.drift_free = spec.drift.empty();
    rep.q_bound_ok = true;
    rep.worst_q.value = kInf;
    rep.worst_drift.value = 0.0;

    const SqrtQhatIntegral inner(cfg.q_hat, cfg.rho0, std::max(samples.r_max, 2.0 * cfg.rho0));
    double kappa_est = 0.0;
    for (const auto& ring : samples.rings) {
        double ring_kappa = 0.0;
        for (const auto& x : ring) {
            const double nv = cfg.norm.value(x);
            const double psi = horizontal_gradient_sq(spec.frame, cfg.norm.expr, x);
            const double qhat_n = cfg.q_hat.eval(std::span<const double>(&nv, 1));
            const double q = spec.potential.eval(x);

            // Q >= psi * qhat(N), with a one-sided rounding slack.
            const double margin = q - psi * qhat_n;
            if (margin < rep.worst_q.value) rep.worst_q = {x, margin};
            if (margin < -1e-9 * (std::abs(q) + psi * qhat_n) - 1e-12) rep.q_bound_ok = false;

            const double lhs = drift_lhs(spec, x);
            const double rhs = psi * sq(inner(nv)) * qhat_n;
            double ratio;
            if (lhs <= 1e-300) {
                ratio = 0.0;
            } else if (rhs <= 1e-300) {
                ratio = kInf;
            } else {
                ratio = lhs / rhs;
            }
            if (ratio > rep.worst_drift.value) rep.worst_drift = {x, ratio};
            ring_kappa = std::max(ring_kappa, ratio);
        }
        rep.ring_kappa.push_back(ring_kappa);
        kappa_est = std::max(kappa_est, ring_kappa);
    }
    rep.kappa_est = kappa_est;
    rep.drift_bound_ok = kappa_est <= cfg.kappa * (1.0 + 1e-9);
    rep.ok = rep.q_bound_ok && rep.drift_bound_ok;
    return rep;
}

GNearReport check_G_near(const OperatorSpec& spec, const CriterionConfig& cfg,
                         std::span<const std::vector<double>> points) {
    GNearReport rep;
    rep.drift_free = spec.drift.empty();
    double kappa_est = 0.0;
    bool any_lhs = false;
    for (const auto& x : points) {
        const double lhs = drift_lhs(spec, x);
        const double q = spec.potential.eval(x);
        double ratio;
        if (lhs <= 1e-300) {
            ratio = 0.0;
        } else if (q <= 1e-300) {
            ratio = kInf;
        } else {
            ratio = lhs / q;
            any_lhs = true;
        }
        if (ratio >= kappa_est) {
            kappa_est = ratio;
            rep.worst = {x, ratio};
        }
        if (std::isinf(ratio)) {
            kappa_est = kInf;
            rep.worst = {x, kInf};
            break;
        }
    }
    rep.kappa_est = kappa_est;
    rep.ok = kappa_est <= cfg.kappa * (1.0 + 1e-9);
    // With b = 0 every kappa works; report the canonical 1.
    if (!any_lhs && kappa_est == 0.0) rep.kappa_est = rep.drift_free ? 1.0 : 0.0;
    return rep;
}

IntegralVerdict classify_integral_numeric(const PowerLawS& s, const CriterionConfig& cfg,
                                          std::vector<double>* log_increments,
                                          std::string* rule) {
    constexpr int kOctaves = 40;
    constexpr int kNodes = 64;  // per octave
    const double rho0 = cfg.rho0;
    const SqrtQhatIntegral inner(cfg.q_hat, rho0, rho0 * std::pow(2.0, kOctaves));

    // log g(r) = Lambda * I(r)^2 - log c - p log r, integrated per octave in
    // u = log r with a log-sum-exp accumulation (no overflow).
    auto log_g = [&](double r) {
        return cfg.lambda * sq(inner(r)) - std::log(s.constant) - s.power * std::log(r);
    };

    std::vector<double> log_inc(kOctaves);
    std::vector<double> lg_end(kOctaves + 1);
    lg_end[0] = log_g(rho0);
    for (int k = 0; k < kOctaves; ++k) {
        const double u0 = std::log(rho0) + k * std::log(2.0);
        const double du = std::log(2.0) / kNodes;
        double m = -kInf;
        std::array<double, kNodes + 1> vals{};
        for (int i = 0; i <= kNodes; ++i) {
            const double u = u0 + du * i;
            const double v = log_g(std::exp(u)) + u;  // dr = r du
            vals[static_cast<std::size_t>(i)] = v;
            m = std::max(m, v);
        }
        double acc = 0.0;
        for (int i = 0; i <= kNodes; ++i) {
            const double w = (i == 0 || i == kNodes) ? 0.5 : 1.0;
            acc += w * std::exp(vals[static_cast<std::size_t>(i)] - m);
        }
        log_inc[static_cast<std::size_t>(k)] = m + std::log(acc * du);
        lg_end[static_cast<std::size_t>(k) + 1] = log_g(rho0 * std::pow(2.0, k + 1));
    }
    if (log_increments) *log_increments = log_inc;

    const int tail = 8;
    auto fire = [&](const char* r, IntegralVerdict v) {
        if (rule) *rule = r;
        return v;
    };

    bool inc_nondecreasing = true;
    for (int k = kOctaves - tail; k < kOctaves - 1; ++k) {
        if (log_inc[static_cast<std::size_t>(k + 1)] < log_inc[static_cast<std::size_t>(k)] - 1e-9)
            inc_nondecreasing = false;
    }
    if (inc_nondecreasing) return fire("octave increments eventually non-decreasing",
                                       IntegralVerdict::divergent);

    bool rg_nondecreasing = true;
    for (int k = kOctaves - tail; k < kOctaves; ++k) {
        const double a = lg_end[static_cast<std::size_t>(k)] + std::log(rho0) + k * std::log(2.0);
        const double b =
            lg_end[static_cast<std::size_t>(k) + 1] + std::log(rho0) + (k + 1) * std::log(2.0);
        if (b < a - 1e-9) rg_nondecreasing = false;
    }
    if (rg_nondecreasing)
        return fire("r * integrand eventually non-decreasing", IntegralVerdict::divergent);

    bool geometric_decay = true;
    for (int k = kOctaves - tail; k < kOctaves - 1; ++k) {
        if (log_inc[static_cast<std::size_t>(k + 1)] - log_inc[static_cast<std::size_t>(k)] >
            std::log(0.9))
            geometric_decay = false;
    }
    const double slope = (lg_end[kOctaves] - lg_end[kOctaves - tail]) /
                         (static_cast<double>(tail) * std::log(2.0));
    if (geometric_decay && slope <= -1.05)
        return fire("increments decay geometrically and tail is dominated by a convergent p-integral",
                    IntegralVerdict::convergent);

    return fire("no decision rule fired", IntegralVerdict::undetermined);
}

IntegralReport classify_integral(const SModel& s_model, const CriterionConfig& cfg) {
    if (cfg.rho0 <= 0.0 || cfg.lambda <= 0.0)
        throw std::invalid_argument("classify_integral needs rho0 > 0 and Lambda > 0");
    IntegralReport rep;

    PowerLawS s;
    if (std::holds_alternative<PowerLawS>(s_model)) {
        s = std::get<PowerLawS>(s_model);
    } else {
        const PowerLawFit fit = power_law_fit(std::get<SurfaceFactorEstimate>(s_model));
        s = PowerLawS{std::exp(fit.log_constant), fit.exponent};
    }
    if (!(s.constant > 0.0)) throw std::invalid_argument("S(r) model needs a positive constant");
    rep.s_power = s.power;
    rep.s_constant = s.constant;

    rep.numeric_verdict =
        classify_integral_numeric(s, cfg, &rep.ladder_log_increment, &rep.rule);
    rep.verdict = rep.numeric_verdict;

    // Closed-form fast path for qhat = c t^-alpha: the integral diverges for
    // every Lambda > 0 iff alpha <= 2 (the exponential factor dominates) or
    // the bare power integral already diverges (p <= 1). For S = c r^{D-1},
    // D >= 3, this is exactly "divergent iff alpha <= 2".
    if (const auto power = cfg.q_hat.match_scaled_power()) {
        const double c_q = power->first;
        const double alpha = -power->second;
        if (c_q > 0.0) {
            rep.fast_path = true;
            rep.alpha = alpha;
            rep.verdict = (alpha <= 2.0 || s.power <= 1.0) ? IntegralVerdict::divergent
                                                           : IntegralVerdict::convergent;
            rep.rule = "closed form for the power-law family";
        }
    }
    return rep;
}

CriterionReport liouville_check(const OperatorSpec& spec, const CriterionConfig& cfg,
                                const SModel& s_model) {
    if (cfg.rho0 <= 0.0) throw std::invalid_argument("rho0 must be positive");
    if (cfg.kappa <= 0.0) throw std::invalid_argument("kappa must be positive");
    if (cfg.lambda <= 0.0) throw std::invalid_argument("Lambda must be positive");
    CriterionReport rep;

    const auto near_pts = sample_ball(cfg.norm, cfg.rho0, cfg.sampling.near_count, cfg.sampling);
    const auto annulus = sample_annulus(cfg.norm, cfg.rho0, cfg.sampling);
    rep.r_max = annulus.r_max;

    // (S) samples cover {N <= 2 rho0} and beyond: the near ball, a ball of
    // radius 2 rho0, and all annulus rings.
    std::vector<std::vector<double>> s_points = near_pts;
    {
        SamplingPlan wide = cfg.sampling;
        wide.seed = mix_seed(cfg.sampling.seed, 17);
        const auto wide_pts =
            sample_ball(cfg.norm, 2.0 * cfg.rho0, cfg.sampling.near_count, wide);
        s_points.insert(s_points.end(), wide_pts.begin(), wide_pts.end());
        for (const auto& ring : annulus.rings)
            s_points.insert(s_points.end(), ring.begin(), ring.end());
    }

    rep.s = check_S(spec, s_points);
    rep.g_far = check_G_far(spec, cfg, annulus);
    rep.g_near = check_G_near(spec, cfg, near_pts);
    rep.integral = classify_integral(s_model, cfg);

    const bool all_ok = rep.s.ok && rep.g_far.ok && rep.g_near.ok &&
                        rep.integral.verdict == IntegralVerdict::divergent;
    rep.overall = all_ok ? CriterionReport::Overall::liouville_holds
                         : CriterionReport::Overall::inconclusive;
    return rep;
}

}  // namespace lioulab
