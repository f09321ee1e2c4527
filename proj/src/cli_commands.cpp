// SPDX-License-Identifier: Apache-2.0
#include "lioulab/cli_commands.hpp"

#include "lioulab/json_io.hpp"
#include "lioulab/pde_checks.hpp"
#include "lioulab/version.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace lioulab {

namespace {

Json load_config(const CliOptions& opts) {
    std::ifstream in(opts.config_path);
    if (!in) throw ConfigError("cannot open config file '" + opts.config_path + "'");
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return j;
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Json envelope(const std::string& command, Json resolved_config, Json result) {
    Json j;
    j["tool"] = "lioulab";
    j["version"] = kVersion;
    j["command"] = command;
    j["config"] = std::move(resolved_config);
    j["result"] = std::move(result);
    j["timestamp"] = timestamp_utc();
    return j;
}

void write_report(const CliOptions& opts, const std::string& name, const Json& j) {
    std::filesystem::create_directories(opts.out_dir);
    const auto path = std::filesystem::path(opts.out_dir) / name;
    std::ofstream out(path);
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("cannot write report to " + path.string());
}

std::uint64_t resolve_seed(const CliOptions& opts, const Json& cfg) {
    if (opts.seed) return *opts.seed;
    return cfg.value("seed", 0ULL);
}

SolveOptions solver_from_json(const Json& j) {
    SolveOptions o;
    if (j.is_null()) return o;
    check_keys(j, {}, {"method", "tol", "max_sweeps", "max_iterations"}, "solver");
    const std::string method = j.value("method", std::string("auto"));
    if (method == "sgs") {
        o.method = SolveOptions::Method::sgs;
    } else if (method == "bicgstab") {
        o.method = SolveOptions::Method::bicgstab;
    } else if (method == "auto") {
        o.method = SolveOptions::Method::automatic;
    } else {
        throw ConfigError("unknown solver method '" + method + "'");
    }
    o.tol = j.value("tol", o.tol);
    o.max_sweeps = j.value("max_sweeps", o.max_sweeps);
    o.max_iterations = j.value("max_iterations", o.max_iterations);
    return o;
}

SamplingPlan sampling_from_json(const Json& j, std::uint64_t seed) {
    SamplingPlan plan;
    plan.seed = seed;
    if (j.is_null()) return plan;
    check_keys(j, {},
               {"near_count", "ring_count", "rings", "singular_radius", "singular_points"},
               "sampling");
    plan.near_count = j.value("near_count", plan.near_count);
    plan.ring_count = j.value("ring_count", plan.ring_count);
    plan.rings = j.value("rings", plan.rings);
    plan.singular_radius = j.value("singular_radius", plan.singular_radius);
    if (j.contains("singular_points"))
        plan.singular_points = j["singular_points"].get<std::vector<std::vector<double>>>();
    return plan;
}

}  // namespace

int cmd_check_frame(const CliOptions& opts) {
    Json cfg = load_config(opts);
    check_keys(cfg, {"frame"}, {"points", "max_step", "seed"}, "check-frame");
    const Frame frame = frame_from_json(cfg["frame"], /*validated=*/false);
    const std::uint64_t seed = resolve_seed(opts, cfg);

    int count = 50;
    double range = 10.0;
    if (cfg.contains("points")) {
        check_keys(cfg["points"], {}, {"count", "range"}, "points");
        count = cfg["points"].value("count", count);
        range = cfg["points"].value("range", range);
    }
    const int max_step = cfg.value("max_step", 0);

    std::vector<std::vector<double>> points;
    UniformStream rng(mix_seed(seed, 1));
    for (int k = 0; k < count; ++k) {
        std::vector<double> x(static_cast<std::size_t>(frame.dim()));
        for (auto& c : x) c = rng.next(-range, range);
        points.push_back(std::move(x));
    }

    const FrameCheckReport h1 = frame.structural_report();
    const HoermanderReport hr = check_hoermander(frame, points, max_step);
    const bool ntd = check_ntd(frame, points);
    const bool pass = h1.ok() && hr.satisfied && ntd;

    Json result;
    result["h1"] = {{"homogeneous_degree_one", h1.homogeneous_degree_one},
                    {"divergence_free", h1.divergence_free},
                    {"detail", h1.detail}};
    result["hoermander"] = {{"satisfied", hr.satisfied}, {"step", hr.step}};
    if (!hr.satisfied && !hr.worst_point.empty()) {
        result["hoermander"]["worst_point"] = hr.worst_point;
        result["hoermander"]["worst_rank"] = hr.worst_rank;
    }
    result["ntd"] = ntd;
    result["pass"] = pass;

    Json resolved = cfg;
    resolved["seed"] = seed;
    resolved["frame"] = frame_to_json(frame);
    const Json rep = envelope("check-frame", resolved, result);
    write_report(opts, "check_frame_report.json", rep);
    std::cout << rep["result"].dump(2) << "\n";
    return pass ? 0 : 1;
}

int cmd_surface_factor(const CliOptions& opts) {
    Json cfg = load_config(opts);
    check_keys(cfg, {"frame", "norm", "r_values", "samples"}, {"seed", "threads"},
               "surface-factor");
    const Frame frame = frame_from_json(cfg["frame"]);
    const ExhaustionNorm norm = norm_from_json(cfg["norm"]);
    const auto r_values = cfg["r_values"].get<std::vector<double>>();
    const auto samples = cfg["samples"].get<std::uint64_t>();
    const std::uint64_t seed = resolve_seed(opts, cfg);
    const int threads = opts.threads > 0 ? opts.threads : cfg.value("threads", 0);

    const SurfaceFactorEstimate est = surface_scan(frame, norm, r_values, samples, seed, threads);
    const PowerLawFit fit = power_law_fit(est);

    std::filesystem::create_directories(opts.out_dir);
    const auto csv_path = std::filesystem::path(opts.out_dir) / "surface_factor.csv";
    {
        std::ofstream csv(csv_path);
        csv << "r,S,stderr\n";
        csv.precision(17);
        for (std::size_t i = 0; i < est.r.size(); ++i)
            csv << est.r[i] << "," << est.s[i] << "," << est.stderr_[i] << "\n";
    }

    Json result;
    result["rows"] = Json::array();
    for (std::size_t i = 0; i < est.r.size(); ++i)
        result["rows"].push_back(Json{{"r", est.r[i]}, {"S", est.s[i]}, {"stderr", est.stderr_[i]}});
    result["fit"] = {{"exponent", fit.exponent}, {"log_constant", fit.log_constant}};
    result["csv"] = csv_path.string();

    Json resolved = cfg;
    resolved["seed"] = seed;
    resolved["frame"] = frame_to_json(frame);
    resolved["norm"] = norm_to_json(norm);
    const Json rep = envelope("surface-factor", resolved, result);
    write_report(opts, "surface_factor_report.json", rep);
    std::cout << rep["result"]["fit"].dump() << "\n";
    return 0;
}

int cmd_criterion(const CliOptions& opts) {
    Json cfg = load_config(opts);
    check_keys(cfg,
               {"frame", "norm", "potential", "rho0", "q_hat", "kappa", "lambda", "s_model"},
               {"drift", "sampling", "seed", "threads"}, "criterion");
    const Frame frame = frame_from_json(cfg["frame"]);
    CriterionConfig crit{norm_from_json(cfg["norm"]),
                         cfg["rho0"].get<double>(),
                         parse_scalar_expr(cfg["q_hat"].get<std::string>(), 1, "t"),
                         cfg["kappa"].get<double>(),
                         cfg["lambda"].get<double>(),
                         {}};
    const std::uint64_t seed = resolve_seed(opts, cfg);
    crit.sampling = sampling_from_json(cfg.contains("sampling") ? cfg["sampling"] : Json(),
                                       seed);

    ScalarExpr q = potential_from_json(cfg["potential"], frame);
    std::vector<ScalarExpr> drift =
        cfg.contains("drift") ? drift_from_json(cfg["drift"], frame) : std::vector<ScalarExpr>{};
    OperatorSpec spec(frame, std::move(drift), std::move(q));

    SModel s_model;
    const Json& sm = cfg["s_model"];
    if (sm.contains("power_law")) {
        check_keys(sm, {"power_law"}, {}, "s_model");
        check_keys(sm["power_law"], {"constant", "power"}, {}, "s_model.power_law");
        s_model = PowerLawS{sm["power_law"]["constant"].get<double>(),
                            sm["power_law"]["power"].get<double>()};
    } else if (sm.contains("mc")) {
        check_keys(sm, {"mc"}, {}, "s_model");
        check_keys(sm["mc"], {"samples", "r_values"}, {}, "s_model.mc");
        const int threads = opts.threads;
        s_model = surface_scan(spec.frame, crit.norm,
                               sm["mc"]["r_values"].get<std::vector<double>>(),
                               sm["mc"]["samples"].get<std::uint64_t>(), mix_seed(seed, 99),
                               threads);
    } else {
        throw ConfigError("s_model needs 'power_law' or 'mc'");
    }

    const CriterionReport rep = liouville_check(spec, crit, s_model);

    Json resolved = cfg;
    resolved["seed"] = seed;
    resolved["frame"] = frame_to_json(frame);
    resolved["norm"] = norm_to_json(crit.norm);
    const Json out = envelope("criterion", resolved, criterion_report_to_json(rep));
    write_report(opts, "criterion_report.json", out);
    std::cout << out["result"]["overall"].dump() << "\n";
    return 0;
}

int cmd_solve(const CliOptions& opts) {
    Json cfg = load_config(opts);
    check_keys(cfg, {"frame", "box", "potential", "boundary"},
               {"drift", "rhs", "solver", "dump_csv", "seed"}, "solve");
    const Frame frame = frame_from_json(cfg["frame"]);
    check_keys(cfg["box"], {"lo", "hi", "cells"}, {}, "box");
    const BoxDomain dom(cfg["box"]["lo"].get<std::vector<double>>(),
                        cfg["box"]["hi"].get<std::vector<double>>(),
                        cfg["box"]["cells"].get<std::vector<int>>());
    ScalarExpr q = potential_from_json(cfg["potential"], frame);
    std::vector<ScalarExpr> drift =
        cfg.contains("drift") ? drift_from_json(cfg["drift"], frame) : std::vector<ScalarExpr>{};
    OperatorSpec spec(frame, std::move(drift), std::move(q));

    const ScalarExpr boundary_expr =
        parse_scalar_expr(cfg["boundary"].get<std::string>(), frame.dim());
    GridField boundary(dom);
    boundary.fill_boundary([&](std::span<const double> x) { return boundary_expr.eval(x); });
    GridField rhs(dom);
    if (cfg.contains("rhs")) {
        const ScalarExpr rhs_expr = parse_scalar_expr(cfg["rhs"].get<std::string>(), frame.dim());
        rhs.fill([&](std::span<const double> x) { return rhs_expr.eval(x); });
    }

    const DiscreteOperator op = assemble(spec, dom);
    SolveReport srep;
    const SolveOptions sopts =
        solver_from_json(cfg.contains("solver") ? cfg["solver"] : Json());
    const GridField u = solve_dirichlet(op, boundary, rhs, sopts, &srep);

    Json result;
    result["solve"] = solve_report_to_json(srep);
    result["sign_structure_ok"] = op.sign_report().ok();
    if (cfg.value("dump_csv", true)) {
        std::filesystem::create_directories(opts.out_dir);
        const auto csv_path = std::filesystem::path(opts.out_dir) / "field.csv";
        std::ofstream csv(csv_path);
        csv.precision(17);
        for (int a = 0; a < dom.n; ++a) csv << "x" << (a + 1) << ",";
        csv << "value\n";
        std::vector<int> idx(static_cast<std::size_t>(dom.n));
        std::vector<double> x(static_cast<std::size_t>(dom.n));
        for (std::int64_t id = 0; id < dom.node_count(); ++id) {
            dom.node_index(id, idx);
            dom.coordinates(idx, x);
            for (double c : x) csv << c << ",";
            csv << u.at(id) << "\n";
        }
        result["csv"] = csv_path.string();
    }

    Json resolved = cfg;
    resolved["frame"] = frame_to_json(frame);
    const Json out = envelope("solve", resolved, result);
    write_report(opts, "solve_report.json", out);
    std::cout << out["result"]["solve"].dump() << "\n";
    return srep.converged ? 0 : 1;
}

namespace {

// Decay threshold for the center sequence, calibrated on fine-grid ladder
// runs of the directional scheme (the observed u_8(0)/u_2(0) is ~0.53 in
// the Liouville regime and ~0.86 in the nonuniqueness regime, stable in h).
constexpr double kCenterDecayRatio = 0.55;

std::string dichotomy_verdict(const InvadingRun& run) {
    const double gamma = run.config.gamma;
    bool decreasing = true;
    for (std::size_t i = 0; i + 1 < run.rungs.size(); ++i) {
        if (run.rungs[i + 1].center > run.rungs[i].center + 1e-6) decreasing = false;
    }
    const double first = run.rungs.front().center;
    const double last = run.rungs.back().center;
    if (decreasing && last <= kCenterDecayRatio * first) return "liouville-consistent";
    if (decreasing && run.limit_estimate >= 0.05 * gamma) return "nonuniqueness-witnessed";
    return "inconclusive";
}

void write_slice_csv(const CliOptions& opts, const std::string& name, const GridField& u,
                     int t_axis) {
    std::filesystem::create_directories(opts.out_dir);
    std::ofstream csv(std::filesystem::path(opts.out_dir) / name);
    csv.precision(17);
    const BoxDomain& dom = u.domain;
    for (int a = 0; a < dom.n; ++a)
        if (a != t_axis) csv << "x" << (a + 1) << ",";
    csv << "value\n";
    std::vector<int> idx(static_cast<std::size_t>(dom.n));
    std::vector<double> x(static_cast<std::size_t>(dom.n));
    for (std::int64_t id = 0; id < dom.node_count(); ++id) {
        dom.node_index(id, idx);
        if (idx[static_cast<std::size_t>(t_axis)] != dom.cells[static_cast<std::size_t>(t_axis)] / 2)
            continue;
        dom.coordinates(idx, x);
        for (int a = 0; a < dom.n; ++a)
            if (a != t_axis) csv << x[static_cast<std::size_t>(a)] << ",";
        csv << u.at(id) << "\n";
    }
}

}  // namespace

int cmd_dichotomy(const CliOptions& opts) {
    Json cfg = load_config(opts);
    check_keys(cfg, {"alphas"},
               {"preset", "m", "gammas", "ladder", "h", "q_family", "barrier", "solver",
                "slice_csv", "seed"},
               "dichotomy");
    const auto alphas = cfg["alphas"].get<std::vector<double>>();
    if (alphas.empty()) throw ConfigError("dichotomy: alphas must be non-empty");
    const auto gammas = cfg.value("gammas", std::vector<double>{1.0});
    if (gammas.empty()) throw ConfigError("dichotomy: gammas must be non-empty");

    InvadingConfig base;
    base.preset = cfg.value("preset", std::string("heisenberg"));
    base.m = cfg.value("m", 1);
    if (cfg.contains("ladder")) base.ladder = cfg["ladder"].get<std::vector<int>>();
    base.h = cfg.value("h", 0.125);
    const std::string family = cfg.value("q_family", std::string("grad_weighted"));
    base.q_family = family == "plain" ? QFamily::plain : QFamily::grad_weighted;
    if (cfg.contains("solver")) base.solver = solver_from_json(cfg["solver"]);

    BarrierSpec barrier;
    if (cfg.contains("barrier")) {
        check_keys(cfg["barrier"], {}, {"variant", "beta", "r0", "amplitude"}, "barrier");
        const std::string variant = cfg["barrier"].value("variant", std::string("radial"));
        barrier.variant = variant == "cylindrical" ? BarrierSpec::Variant::cylindrical
                                                   : BarrierSpec::Variant::radial;
        barrier.beta = cfg["barrier"].value("beta", 0.5);
        barrier.r0 = cfg["barrier"].value("r0", 1.0);
        barrier.amplitude = cfg["barrier"].value("amplitude", 0.0);  // 0 = fit to samples
    }
    const std::uint64_t seed = resolve_seed(opts, cfg);

    Json runs = Json::array();
    bool all_converged = true;
    for (double alpha : alphas) {
        for (double gamma : gammas) {
            InvadingConfig rc = base;
            rc.alpha = alpha;
            rc.gamma = gamma;
            const InvadingRun run = invading_run(rc);
            Json jr = invading_run_to_json(run);
            jr["verdict"] = dichotomy_verdict(run);

            if (alpha > 2.0 && rc.preset != "grushin") {
                std::string why;
                BarrierSpec b = barrier;
                if (barrier_window_valid(b, rc.m, alpha, &why)) {
                    const ScalarExpr q =
                        heisenberg_surrogate_potential(rc.m, alpha, rc.q_family);
                    const auto pts = sample_outside_cutoff(b, rc.m, 2000, mix_seed(seed, 3));
                    BarrierReport brep = barrier_check(b, rc.m, alpha, q, pts);
                    if (b.amplitude <= 0.0) {
                        b.amplitude = 1.1 * brep.a_min;
                        brep = barrier_check(b, rc.m, alpha, q, pts);
                    }
                    const double v_r0 = b.amplitude * std::pow(b.r0, -b.beta);
                    const double delta = std::max(gamma, gamma / v_r0);
                    const Step2Report s2 = step2_certificate(run, b, delta);
                    jr["barrier"] = barrier_report_to_json(brep);
                    jr["barrier"]["amplitude"] = b.amplitude;
                    jr["step2"] = step2_report_to_json(s2);
                    jr["step2"]["delta"] = delta;
                } else {
                    jr["barrier"] = {{"applicable", false}, {"detail", why}};
                }
            }

            for (const auto& r : run.rungs) all_converged = all_converged && r.solve.converged;
            if (cfg.value("slice_csv", true) && rc.preset != "grushin") {
                std::ostringstream name;
                name << "slice_alpha" << alpha << "_gamma" << gamma << ".csv";
                write_slice_csv(opts, name.str(), run.solutions.back(), 2 * rc.m);
            }
            runs.push_back(std::move(jr));
        }
    }

    Json result;
    result["runs"] = runs;
    Json resolved = cfg;
    resolved["seed"] = seed;
    const Json out = envelope("dichotomy", resolved, result);
    write_report(opts, "dichotomy_report.json", out);
    for (const auto& r : runs)
        std::cout << "alpha=" << r["alpha"] << " gamma=" << r["gamma"] << " -> "
                  << r["verdict"].get<std::string>() << "\n";
    return all_converged ? 0 : 1;
}

int cmd_barrier(const CliOptions& opts) {
    Json cfg = load_config(opts);
    check_keys(cfg, {"m", "alpha", "beta"},
               {"variant", "amplitude", "r0", "samples", "seed", "potential"}, "barrier");
    const int m = cfg["m"].get<int>();
    const double alpha = cfg["alpha"].get<double>();
    BarrierSpec b;
    const std::string variant = cfg.value("variant", std::string("radial"));
    b.variant = variant == "cylindrical" ? BarrierSpec::Variant::cylindrical
                                         : BarrierSpec::Variant::radial;
    b.beta = cfg["beta"].get<double>();
    b.amplitude = cfg.value("amplitude", 1.0);
    b.r0 = cfg.value("r0", 1.0);
    const int samples = cfg.value("samples", 2000);
    const std::uint64_t seed = resolve_seed(opts, cfg);

    const Frame frame = heisenberg_frame(m);
    const ScalarExpr q = cfg.contains("potential")
                             ? potential_from_json(cfg["potential"], frame)
                             : heisenberg_surrogate_potential(m, alpha, QFamily::grad_weighted);

    std::string why;
    Json result;
    if (!barrier_window_valid(b, m, alpha, &why)) {
        result["applicable"] = false;
        result["detail"] = why;
        const Json out = envelope("barrier", cfg, result);
        write_report(opts, "barrier_report.json", out);
        std::cout << out["result"].dump(2) << "\n";
        return 1;
    }
    const auto pts = sample_outside_cutoff(b, m, samples, seed);
    const BarrierReport rep = barrier_check(b, m, alpha, q, pts);
    result = barrier_report_to_json(rep);
    result["applicable"] = true;
    const Json out = envelope("barrier", cfg, result);
    write_report(opts, "barrier_report.json", out);
    std::cout << out["result"].dump(2) << "\n";
    return rep.ok ? 0 : 1;
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"lioulab: a laboratory for Liouville-type properties of hypoelliptic "
                 "operators built on homogeneous vector fields"};
    app.require_subcommand(1);

    CliOptions opts;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "JSON config path")->required();
        sub->add_option("--out", opts.out_dir, "output directory");
        sub->add_option("--seed", [&opts](const std::vector<std::string>& v) {
            opts.seed = std::stoull(v.front());
            return true;
        }, "override the config seed");
        sub->add_option("--threads", opts.threads, "worker threads (0 = hardware)");
    };

    auto* check = app.add_subcommand("check-frame", "verify (H1), Hoermander rank and NTD");
    add_common(check);
    auto* surf = app.add_subcommand("surface-factor", "estimate S(r) and fit the power law");
    add_common(surf);
    auto* crit = app.add_subcommand("criterion", "run the Liouville criterion checks");
    add_common(crit);
    auto* solve = app.add_subcommand("solve", "assemble and solve one Dirichlet problem");
    add_common(solve);
    auto* dich = app.add_subcommand("dichotomy", "invading-domain runs over alpha/gamma lists");
    add_common(dich);
    auto* barr = app.add_subcommand("barrier", "check a barrier supersolution inequality");
    add_common(barr);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (check->parsed()) return cmd_check_frame(opts);
        if (surf->parsed()) return cmd_surface_factor(opts);
        if (crit->parsed()) return cmd_criterion(opts);
        if (solve->parsed()) return cmd_solve(opts);
        if (dich->parsed()) return cmd_dichotomy(opts);
        if (barr->parsed()) return cmd_barrier(opts);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace lioulab
