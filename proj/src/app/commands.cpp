#include "xva/app/commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <memory>

#include "xva/app/config.hpp"
#include "xva/app/io.hpp"
#include "xva/app/manifest.hpp"
#include "xva/default_clock.hpp"
#include "xva/errors.hpp"
#include "xva/mild_solver.hpp"
#include "xva/parallel.hpp"
#include "xva/simulate.hpp"
#include "xva/valuation.hpp"

namespace xva::app {

using nlohmann::json;

namespace {

constexpr std::uint64_t kHullStream = 0xA11;
constexpr std::uint64_t kResidualStream = 0x5E5;
constexpr std::uint64_t kDefaultsStream = 0xDEF;
constexpr std::uint64_t kOracleStream = 0x0AC;
constexpr std::uint64_t kValidationStream = 0x7F4A7C15;
constexpr double kIdentityTolerance = 1e-6;
constexpr double kSurvivalGapLimit = 0.01;
constexpr double kLeakageLimit = 0.01;

struct Context {
    RunConfig cfg;
    std::unique_ptr<RunDirectory> dir;
    int threads = 1;
    std::string compare_path;
};

double x0_of(const RunConfig& cfg) { return std::log(cfg.model.s0); }

int guarded(const std::string& command, const CommandOptions& options, const std::function<int(Context&)>& body) {
    Context ctx;
    try {
        ctx.cfg = load_config_file(options.config_path);
        if (options.seed) ctx.cfg.mc.master_seed = *options.seed;
        set_default_threads(options.threads);
        ctx.threads = resolve_threads(options.threads);
        ctx.compare_path = options.compare_path;
        ctx.dir = std::make_unique<RunDirectory>(options.out_dir, command, to_json(ctx.cfg));
        ctx.dir->add_seed("master", ctx.cfg.mc.master_seed);
        const int code = body(ctx);
        ctx.dir->set("exit_code", code);
        ctx.dir->finish(ctx.threads);
        return code;
    } catch (const std::exception& e) {
        int code = kNumerical;
        if (dynamic_cast<const InvalidPathBudget*>(&e)) {
            code = kInvalidPaths;
        } else if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InvariantViolation*>(&e) ||
                   dynamic_cast<const DomainError*>(&e) || dynamic_cast<const ConditionError*>(&e) ||
                   dynamic_cast<const MarginError*>(&e) || dynamic_cast<const json::exception*>(&e)) {
            code = kValidation;
        }
        std::cerr << "xva_mild " << command << ": " << e.what() << "\n";
        if (ctx.dir) ctx.dir->fail(e.what());
        return code;
    }
}

json positivity_json(const PositivityReport& p) {
    return json{{"holds", p.holds},          {"gamma_star", p.gamma_star}, {"lambda_sum", p.lambda_sum},
                {"k_inf", p.k_inf},          {"delta", p.delta},           {"witness", p.witness},
                {"inequality", p.inequality}};
}

json picard_json(const PicardReport& r) {
    json slabs = json::array();
    for (const auto& s : r.slabs) {
        slabs.push_back(json{{"t_begin", s.t_begin},
                             {"t_end", s.t_end},
                             {"lipschitz_integral", s.lipschitz_integral},
                             {"sup_diffs", s.sup_diffs},
                             {"noise_floors", s.noise_floors},
                             {"converged", s.converged}});
    }
    return json{{"iterates", r.iterates},
                {"sup_diffs", r.sup_diffs},
                {"converged", r.converged},
                {"mc_stderr_floor", r.mc_stderr_floor},
                {"slabs", slabs},
                {"sup_u", r.sup_u},
                {"growth_bound", r.growth_bound},
                {"coverage_fraction", r.coverage_fraction},
                {"validated", r.validated},
                {"validation_sup_diff", r.validation_sup_diff},
                {"validation_max_z", r.validation_max_z},
                {"validation_frac_over_3se", r.validation_frac_over_3se}};
}

json residual_json(const ResidualReport& r) {
    return json{{"checkpoints", r.checkpoints}, {"mean", r.mean},
                {"stderr", r.stderr_},          {"n", r.n},
                {"coverage_fraction", r.coverage_fraction}, {"max_abs_z", r.max_abs_z}};
}

struct SolveRun {
    VolModel model_Q;
    SolverGrid grid;
    PicardResult result;
    ResidualReport residuals;
};

SolveRun solve(Context& ctx) {
    const RunConfig& cfg = ctx.cfg;
    SolveRun run{pricing_model(cfg, false), {}, {}, {}};
    run.grid = solver_grid(cfg, run.model_Q);
    McConfig mc = mc_config(cfg);
    mc.threads = ctx.threads;
    run.result = picard_solve(run.model_Q, cfg.market, run.grid, mc, solver_config(cfg));

    ResidualOptions ro;
    ro.n_steps = cfg.mc.residual_steps;
    ro.coverage_limit = cfg.mc.coverage_limit;
    ro.threads = ctx.threads;
    const std::uint64_t residual_seed = derive_seed(cfg.mc.master_seed, kResidualStream);
    run.residuals = martingale_residual(cfg.market, run.model_Q, run.result.u, cfg.grid.t0, x0_of(cfg),
                                        cfg.model.v0, run.result.u.t().nodes(), cfg.mc.residual_paths,
                                        residual_seed, ro);

    if (!cfg.grid.x_range || !cfg.grid.v_range) ctx.dir->add_seed("hull", derive_seed(cfg.mc.master_seed, kHullStream));
    ctx.dir->add_seed("residual", residual_seed);
    if (cfg.solver.fresh_validation) ctx.dir->add_seed("validation", derive_seed(cfg.mc.master_seed, kValidationStream));
    return run;
}

void write_solve(Context& ctx, const SolveRun& run) {
    RunDirectory& dir = *ctx.dir;
    write_grid_csv(dir.path("u.csv"), run.result.u, run.result.stderr_);
    write_grid_bin(dir.path("u.bin"), run.result.u, run.result.stderr_);
    json report = picard_json(run.result.report);
    report["grid"] = json{{"t", run.result.u.t().nodes()},
                          {"x_lo", run.grid.x_lo},
                          {"x_hi", run.grid.x_hi},
                          {"nx", run.grid.nx},
                          {"v_lo", run.grid.v_lo},
                          {"v_hi", run.grid.v_hi},
                          {"nv", run.grid.nv}};
    report["positivity"] = positivity_json(positivity(ctx.cfg));
    report["residuals"] = residual_json(run.residuals);
    write_json(dir.path("picard.json"), report);
    write_residuals_csv(dir.path("residuals.csv"), run.residuals);
    for (const char* name : {"u.csv", "u.bin", "picard.json", "residuals.csv"}) dir.add_output(name);
}

OracleValue value_at(const PicardResult& res, double t, double x, double v) {
    GridFunction se(res.u.t(), res.u.x(), res.u.v());
    se.values() = res.stderr_;
    return OracleValue{res.u(t, x, v), se(t, x, v)};
}

json suite(const std::string& status, json details) {
    return json{{"status", status}, {"details", std::move(details)}};
}

} // namespace

int cmd_simulate(const CommandOptions& options) {
    return guarded("simulate", options, [](Context& ctx) {
        const RunConfig& cfg = ctx.cfg;
        const VolModel model = physical_model(cfg, false);
        const TimeGrid grid{cfg.grid.t0, cfg.grid.T, cfg.grid.n_steps};
        SimulateOptions so;
        so.threads = ctx.threads;
        so.record_stride = cfg.mc.record_stride;
        const PathSet paths =
            simulate_paths(model, x0_of(cfg), cfg.model.v0, grid, cfg.mc.simulate_paths, cfg.mc.master_seed, so);

        RunDirectory& dir = *ctx.dir;
        write_paths_csv(dir.path("paths.csv"), paths);
        write_paths_bin(dir.path("paths.bin"), paths);

        const MomentReport m = moment_report(paths, model);
        const PositivityStats p = positivity_report(paths);
        json doc{{"n_paths", paths.n_paths},
                 {"invalid_paths", paths.invalid_paths},
                 {"scheme", to_string(paths.scheme)},
                 {"moments",
                  {{"bounds_known", m.bounds_known},
                   {"times", m.times},
                   {"mean_abs_v", m.mean_abs_v},
                   {"stderr_abs_v", m.stderr_abs_v},
                   {"v_bound", m.v_bound},
                   {"v_bound_violated", m.v_bound_violated},
                   {"mean_sup_abs_x", m.mean_sup_abs_x},
                   {"stderr_sup_abs_x", m.stderr_sup_abs_x},
                   {"sup_mean_v", m.sup_mean_v},
                   {"x_bound", m.x_bound},
                   {"x_bound_violated", m.x_bound_violated},
                   {"mean_sup_abs_dx", m.mean_sup_abs_dx}}},
                 {"positivity", {{"min_v", p.min_v}, {"frac_nonpositive", p.frac_nonpositive}}},
                 {"positivity_condition", positivity_json(positivity(cfg))}};
        write_json(dir.path("moments.json"), doc);
        for (const char* name : {"paths.csv", "paths.bin", "moments.json"}) dir.add_output(name);
        return static_cast<int>(kOk);
    });
}

int cmd_defaults(const CommandOptions& options) {
    return guarded("defaults", options, [](Context& ctx) {
        const RunConfig& cfg = ctx.cfg;
        const DefaultSpec& spec = cfg.market.defaults;
        const TimeGrid grid{cfg.grid.t0, cfg.grid.T, cfg.grid.n_steps};
        const SurvivalCurve curve = survival_curve(spec, grid);
        const HazardCurve hazard = hazard_curve(spec, grid);
        const DensityResult density = default_density(spec, grid);
        if (!(density.identity_gap <= kIdentityTolerance)) {
            throw NumericalError("density identity gap " + fmt(density.identity_gap) + " exceeds 1e-6");
        }

        const std::size_t n = curve.nodes.size();
        std::vector<double> emp_I, emp_C, emp_joint, gap;
        double sup_gap = 0.0;
        json mc = nullptr;
        if (cfg.mc.check_defaults_mc) {
            const std::uint64_t seed = derive_seed(cfg.mc.master_seed, kDefaultsStream);
            ctx.dir->add_seed("defaults", seed);
            const DefaultSamples s = sample_default_times(spec, grid, cfg.mc.default_samples, seed, ctx.threads);
            std::vector<double> first(s.tau_I.size());
            for (std::size_t i = 0; i < first.size(); ++i) first[i] = std::min(s.tau_I[i], s.tau_C[i]);
            emp_I = empirical_survival(s.tau_I, curve.nodes);
            emp_C = empirical_survival(s.tau_C, curve.nodes);
            emp_joint = empirical_survival(first, curve.nodes);
            gap.resize(n);
            for (std::size_t k = 0; k < n; ++k) {
                gap[k] = std::max({std::abs(emp_I[k] - curve.g_I[k]), std::abs(emp_C[k] - curve.g_C[k]),
                                   std::abs(emp_joint[k] - curve.g_joint[k])});
                sup_gap = std::max(sup_gap, gap[k]);
            }
            mc = json{{"samples", cfg.mc.default_samples},
                      {"sup_gap", sup_gap},
                      {"limit", kSurvivalGapLimit},
                      {"pass", sup_gap <= kSurvivalGapLimit},
                      {"ties", s.ties},
                      {"tie_bound", s.tie_bound}};
        }

        RunDirectory& dir = *ctx.dir;
        std::string csv = "t,g_I,g_C,g_joint,hazard_I,hazard_C,phi_rho";
        if (!gap.empty()) csv += ",emp_g_I,emp_g_C,emp_g_joint,gap";
        csv += "\n";
        for (std::size_t k = 0; k < n; ++k) {
            csv += fmt(curve.nodes[k]) + ',' + fmt(curve.g_I[k]) + ',' + fmt(curve.g_C[k]) + ',' +
                   fmt(curve.g_joint[k]) + ',' + fmt(hazard.hazard_I[k]) + ',' + fmt(hazard.hazard_C[k]) + ',' +
                   fmt(density.phi[k]);
            if (!gap.empty()) {
                csv += ',' + fmt(emp_I[k]) + ',' + fmt(emp_C[k]) + ',' + fmt(emp_joint[k]) + ',' + fmt(gap[k]);
            }
            csv += '\n';
        }
        write_text(dir.path("survival.csv"), csv);
        write_json(dir.path("defaults.json"), json{{"density_integral", density.integral},
                                                   {"atom", density.atom},
                                                   {"identity_gap", density.identity_gap},
                                                   {"monte_carlo", mc}});
        dir.add_output("survival.csv");
        dir.add_output("defaults.json");
        return static_cast<int>(kOk);
    });
}

int cmd_solve(const CommandOptions& options) {
    return guarded("solve", options, [](Context& ctx) {
        const SolveRun run = solve(ctx);
        write_solve(ctx, run);
        return static_cast<int>(kOk);
    });
}

int cmd_price(const CommandOptions& options) {
    return guarded("price", options, [](Context& ctx) {
        const SolveRun run = solve(ctx);
        write_solve(ctx, run);
        const RunConfig& cfg = ctx.cfg;
        const OracleValue p = value_at(run.result, cfg.grid.t0, x0_of(cfg), cfg.model.v0);
        write_json(ctx.dir->path("price.json"), json{{"t0", cfg.grid.t0},
                                                     {"s0", cfg.model.s0},
                                                     {"v0", cfg.model.v0},
                                                     {"value", p.value},
                                                     {"stderr", p.stderr_},
                                                     {"converged", run.result.report.converged},
                                                     {"iterates", run.result.report.iterates}});
        ctx.dir->add_output("price.json");
        std::cout << fmt(p.value) << " +- " << fmt(p.stderr_) << "\n";
        return static_cast<int>(kOk);
    });
}

int cmd_verify(const CommandOptions& options) {
    return guarded("verify", options, [](Context& ctx) {
        const RunConfig& cfg = ctx.cfg;
        json suites = json::object();
        bool ok = true;
        auto record = [&](const std::string& name, bool pass, json details) {
            suites[name] = suite(pass ? "pass" : "fail", std::move(details));
            ok = ok && pass;
        };

        const PositivityReport pos = positivity(cfg);
        record("positivity", pos.holds, positivity_json(pos));

        if (pos.holds) {
            // Path moments and leakage under the physical measure.
            const VolModel model = physical_model(cfg, false);
            const TimeGrid grid{cfg.grid.t0, cfg.grid.T, cfg.grid.n_steps};
            SimulateOptions so;
            so.threads = ctx.threads;
            so.record_stride = cfg.grid.n_steps;
            const PathSet paths =
                simulate_paths(model, x0_of(cfg), cfg.model.v0, grid, cfg.mc.simulate_paths, cfg.mc.master_seed, so);
            const MomentReport m = moment_report(paths, model);
            const PositivityStats p = positivity_report(paths);
            record("moments", !m.v_bound_violated && !m.x_bound_violated,
                   json{{"bounds_known", m.bounds_known},
                        {"v_bound_violated", m.v_bound_violated},
                        {"x_bound_violated", m.x_bound_violated}});
            record("leakage", p.frac_nonpositive <= kLeakageLimit,
                   json{{"frac_nonpositive", p.frac_nonpositive}, {"limit", kLeakageLimit}});

            // Default clock.
            const DensityResult density = default_density(cfg.market.defaults, grid);
            json dd{{"identity_gap", density.identity_gap}};
            bool dpass = density.identity_gap <= kIdentityTolerance;
            if (cfg.mc.check_defaults_mc) {
                const SurvivalCurve curve = survival_curve(cfg.market.defaults, grid);
                const std::uint64_t seed = derive_seed(cfg.mc.master_seed, kDefaultsStream);
                ctx.dir->add_seed("defaults", seed);
                const DefaultSamples s =
                    sample_default_times(cfg.market.defaults, grid, cfg.mc.default_samples, seed, ctx.threads);
                const auto emp_I = empirical_survival(s.tau_I, curve.nodes);
                const auto emp_C = empirical_survival(s.tau_C, curve.nodes);
                double gap = 0.0;
                for (std::size_t k = 0; k < curve.nodes.size(); ++k) {
                    gap = std::max({gap, std::abs(emp_I[k] - curve.g_I[k]), std::abs(emp_C[k] - curve.g_C[k])});
                }
                dd["sup_gap"] = gap;
                dpass = dpass && gap <= kSurvivalGapLimit;
            }
            record("defaults", dpass, dd);

            // Solver, martingale residuals and bounds.
            const SolveRun run = solve(ctx);
            const PicardReport& rep = run.result.report;
            record("picard", rep.converged, json{{"iterates", rep.iterates}, {"sup_diffs", rep.sup_diffs}});
            record("growth", rep.sup_u <= rep.growth_bound,
                   json{{"sup_u", rep.sup_u}, {"growth_bound", rep.growth_bound}});
            record("martingale", run.residuals.max_abs_z <= 3.0, residual_json(run.residuals));

            const GridFunction& u = run.result.u;
            std::vector<double> s_values;
            for (double x : u.x().nodes()) s_values.push_back(std::exp(x));
            const double upper = cfg.market.payoff.sup();
            const BoundaryReport b = check_boundary(cfg.market, 0.0, upper, s_values, u.v().nodes());
            if (b.holds) {
                std::size_t outside = 0;
                for (std::size_t i = 0; i < u.size(); ++i) {
                    const double tol = 3.0 * run.result.stderr_[i];
                    if (u.values()[i] < -tol || u.values()[i] > upper + tol) ++outside;
                }
                record("j_invariance", outside == 0, json{{"outside", outside}, {"upper", upper}});
            } else {
                suites["j_invariance"] = suite("not_applicable", json{{"min_at_lower", b.min_at_lower},
                                                                      {"max_at_upper", b.max_at_upper}});
            }

            if (const auto affine = affine_form(cfg.market)) {
                OracleMc omc;
                omc.n_paths = cfg.mc.oracle_paths;
                omc.seed = derive_seed(cfg.mc.master_seed, kOracleStream);
                omc.threads = ctx.threads;
                ctx.dir->add_seed("oracle", omc.seed);
                const OracleValue o = linear_oracle(*affine, run.model_Q, cfg.market.payoff, cfg.grid.T, cfg.grid.t0,
                                                    x0_of(cfg), cfg.model.v0, omc);
                const OracleValue p = value_at(run.result, cfg.grid.t0, x0_of(cfg), cfg.model.v0);
                const double band = 3.0 * std::hypot(o.stderr_, p.stderr_);
                record("affine_oracle", std::abs(o.value - p.value) <= band,
                       json{{"solver", p.value}, {"oracle", o.value}, {"band", band}});
            }

            if (!ctx.compare_path.empty()) {
                const RunConfig hi = load_config_file(ctx.compare_path);
                McConfig mc = mc_config(cfg);
                mc.threads = ctx.threads;
                const ComparisonReport c =
                    comparison_check(run.model_Q, cfg.market, hi.market, run.grid, mc, solver_config(cfg));
                record("comparison", c.pass,
                       json{{"nodes", c.nodes}, {"violations", c.violations}, {"min_gap", c.min_gap}});
            }
        } else {
            for (const char* name : {"moments", "leakage", "defaults", "picard", "growth", "martingale"}) {
                suites[name] = suite("skipped", "positivity condition fails");
            }
        }

        write_json(ctx.dir->path("verify.json"), json{{"pass", ok}, {"suites", suites}});
        ctx.dir->add_output("verify.json");
        for (const auto& item : suites.items()) {
            std::cout << item.value()["status"].get<std::string>() << "  " << item.key() << "\n";
        }
        std::cout << (ok ? "verify: pass" : "verify: FAIL") << "\n";
        return static_cast<int>(ok ? kOk : kVerifyFailed);
    });
}

int run_command(const std::string& name, const CommandOptions& options) {
    if (name == "simulate") return cmd_simulate(options);
    if (name == "defaults") return cmd_defaults(options);
    if (name == "solve") return cmd_solve(options);
    if (name == "price") return cmd_price(options);
    if (name == "verify") return cmd_verify(options);
    std::cerr << "xva_mild: unknown command '" << name << "'\n";
    return kValidation;
}

} // namespace xva::app
