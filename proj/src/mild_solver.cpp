#include "xva/mild_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "xva/errors.hpp"
#include "xva/parallel.hpp"
#include "xva/simulate.hpp"

namespace xva {

namespace {

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    double m = values[mid];
    if (values.size() % 2 == 0) {
        m = 0.5 * (m + *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid)));
    }
    return m;
}

// Per-step data shared by every (x, v) node at one start time.
struct StartTimePlan {
    TimeGrid grid;
    StepCoefficients coeffs;
    std::vector<RateSnapshot> rs;
    std::vector<std::size_t> it;
    std::vector<double> wt;
    std::vector<double> weight;   // trapezoid weights
    std::vector<double> shift;    // lambda_k added to the driver, removed by the discount
    std::vector<double> discount; // exp(-int_s^t lambda)
};

// Smallest shift that makes y -> B(t, y) + lambda y nondecreasing.
double monotone_shift(const MarketSpec& spec, const RateSnapshot& rs) {
    if (rs.piecewise_linear && rs.dividend_state_free) return std::max({0.0, -rs.slope_pos, rs.slope_neg});
    return driver_lipschitz(spec, rs.t);
}

StartTimePlan plan_start(const VolModel& model, const MarketSpec& spec, const Axis& t_axis, double s, double b,
                         int n_steps, bool shifted) {
    StartTimePlan plan;
    plan.grid = TimeGrid{s, b, n_steps};
    plan.coeffs = step_coefficients(model, plan.grid);
    const auto n = static_cast<std::size_t>(n_steps);
    plan.rs.resize(n + 1);
    plan.it.resize(n + 1);
    plan.wt.resize(n + 1);
    plan.weight.assign(n + 1, plan.grid.dt());
    plan.weight.front() *= 0.5;
    plan.weight.back() *= 0.5;
    for (std::size_t k = 0; k <= n; ++k) {
        const double t = plan.grid.node(static_cast<int>(k));
        plan.rs[k] = snapshot(spec, t);
        t_axis.locate(t, plan.it[k], plan.wt[k]);
    }
    plan.shift.assign(n + 1, 0.0);
    plan.discount.assign(n + 1, 1.0);
    if (shifted) {
        for (std::size_t k = 0; k <= n; ++k) plan.shift[k] = monotone_shift(spec, plan.rs[k]);
        double cum = 0.0;
        for (std::size_t k = 1; k <= n; ++k) {
            cum += 0.5 * (plan.shift[k - 1] + plan.shift[k]) * plan.grid.dt();
            plan.discount[k] = std::exp(-cum);
        }
    }
    return plan;
}

// Row of u over x at (t-cell, v) by bilinear weights.
void blend_row(const GridFunction& u, std::size_t it, double wt, double v, double* out) {
    std::size_t iv;
    double wv;
    u.v().locate(v, iv, wv);
    const std::size_t jt = std::min(it + 1, u.nt() - 1);
    const std::size_t jv = std::min(iv + 1, u.nv() - 1);
    const double* a = u.row(it, iv);
    const double* b = u.row(it, jv);
    const double* c = u.row(jt, iv);
    const double* d = u.row(jt, jv);
    const double w00 = (1.0 - wt) * (1.0 - wv);
    const double w01 = (1.0 - wt) * wv;
    const double w10 = wt * (1.0 - wv);
    const double w11 = wt * wv;
    for (std::size_t i = 0; i < u.nx(); ++i) out[i] = w00 * a[i] + w01 * b[i] + w10 * c[i] + w11 * d[i];
}

// Interpolates a blended row at x_j + dx for every node j of a uniform axis.
struct ShiftedLookup {
    long q = 0;
    double w = 0.0;
    long last = 0;

    ShiftedLookup(double dx, double h, std::size_t nx) : last(static_cast<long>(nx) - 1) {
        if (nx > 1) {
            const double d = dx / h;
            const double fl = std::floor(d);
            q = static_cast<long>(fl);
            w = d - fl;
        }
    }

    double operator()(const double* row, long j) const {
        const long c = j + q;
        if (c < 0) return row[0];
        if (c >= last) return row[last];
        return (1.0 - w) * row[c] + w * row[c + 1];
    }

    // Node j lands outside [x_lo, x_hi].
    bool outside(long j) const {
        const long c = j + q;
        return c < 0 || c > last || (c == last && w > 0.0);
    }
};

void set_terminal(GridFunction& u, const Payoff& phi, std::size_t it) {
    for (std::size_t iv = 0; iv < u.nv(); ++iv) {
        for (std::size_t ix = 0; ix < u.nx(); ++ix) u.at(it, ix, iv) = phi(std::exp(u.x()[ix]), u.v()[iv]);
    }
}

bool is_horizon(double t, double T) { return std::abs(t - T) <= 1e-12 * std::max(1.0, std::abs(T)); }

std::pair<long, long> core_range(const Axis& axis, double fraction) {
    const double lo = axis.front();
    const double hi = axis.back();
    const double margin = fraction * (hi - lo);
    long a = -1;
    long b = -2;
    for (std::size_t i = 0; i < axis.size(); ++i) {
        if (axis[i] >= lo + margin - 1e-12 && axis[i] <= hi - margin + 1e-12) {
            if (a < 0) a = static_cast<long>(i);
            b = static_cast<long>(i);
        }
    }
    return {a, b};
}

double lipschitz_integral(const MarketSpec& spec, double a, double b) {
    constexpr int kPoints = 400;
    const double h = (b - a) / kPoints;
    double total = 0.0;
    for (int i = 0; i < kPoints; ++i) total += driver_lipschitz(spec, a + (i + 0.5) * h) * h;
    return total;
}

} // namespace

void SolverGrid::validate() const {
    if (!(T > t0) || t0 < 0.0) throw DomainError("solver grid: need 0 <= t0 < T");
    if (nt < 2) throw DomainError("solver grid: nt must be >= 2");
    if (nx < 1 || nv < 1) throw DomainError("solver grid: nx and nv must be >= 1");
    if (nx > 1 && !(x_hi > x_lo)) throw DomainError("solver grid: need x_hi > x_lo");
    if (!(v_lo > 0.0)) throw DomainError("solver grid: v_lo must be positive");
    if (nv > 1 && !(v_hi > v_lo)) throw DomainError("solver grid: need v_hi > v_lo");
}

ApplyResult feynman_kac_slab(const VolModel& model_Q, const MarketSpec& spec, const GridFunction& u_in,
                             const McConfig& mc, std::size_t it_lo, std::size_t it_hi, bool include_driver) {
    if (it_hi >= u_in.nt() || it_lo > it_hi) throw DomainError("feynman_kac: bad slab indices");
    if (u_in.nx() > 1 && !u_in.x().is_uniform()) throw DomainError("feynman_kac: x axis must be uniform");
    if (mc.n_paths < 2) throw DomainError("feynman_kac: need at least two paths");
    if (mc.node_steps < 1) throw DomainError("feynman_kac: node_steps must be >= 1");

    const Axis& ta = u_in.t();
    const Axis& xa = u_in.x();
    const Axis& va = u_in.v();
    const std::size_t nx = xa.size();
    const std::size_t nv = va.size();
    const double b_time = ta[it_hi];
    const bool payoff_end = is_horizon(b_time, spec.horizon);
    const double h = nx > 1 ? xa.spacing() : 1.0;

    // The driver reads u_in everywhere, including at the horizon.
    const GridFunction& src = u_in;

    ApplyResult res;
    res.u = u_in;
    if (payoff_end) set_terminal(res.u, spec.payoff, it_hi);
    res.stderr_.assign(src.size(), 0.0);
    if (it_lo == it_hi) return res;

    const std::size_t n = mc.n_paths;
    const auto steps = static_cast<std::size_t>(mc.node_steps);
    std::vector<double> z(n * 2 * steps);
    parallel_for(
        n,
        [&](std::size_t begin, std::size_t end) {
            for (std::size_t p = begin; p < end; ++p) fill_normals(mc.master_seed, p, &z[p * 2 * steps], 2 * steps);
        },
        mc.threads);

    std::vector<double> exp_x(nx);
    for (std::size_t j = 0; j < nx; ++j) exp_x[j] = std::exp(xa[j]);

    const auto [cx_a, cx_b] = core_range(xa, mc.core_fraction);
    const auto [cv_a, cv_b] = core_range(va, mc.core_fraction);
    const long core_x = cx_b >= cx_a ? cx_b - cx_a + 1 : 0;

    std::vector<StartTimePlan> plans(it_hi - it_lo);
    for (std::size_t it = it_lo; it < it_hi; ++it) {
        plans[it - it_lo] = plan_start(model_Q, spec, ta, ta[it], b_time, mc.node_steps, include_driver && mc.monotone_shift);
    }

    const std::size_t n_pairs = (it_hi - it_lo) * nv;
    std::vector<std::size_t> invalid(n_pairs, 0);
    std::vector<std::size_t> outside(n_pairs, 0);
    std::vector<std::size_t> visited(n_pairs, 0);

    parallel_for(
        n_pairs,
        [&](std::size_t begin, std::size_t end) {
            std::vector<double> dx(steps + 1), vv(steps + 1), y(nx), sum(nx), sum_sq(nx), row(nx);
            for (std::size_t pair = begin; pair < end; ++pair) {
                const std::size_t it = it_lo + pair / nv;
                const std::size_t iv = pair % nv;
                const StartTimePlan& plan = plans[it - it_lo];
                const bool core_v = static_cast<long>(iv) >= cv_a && static_cast<long>(iv) <= cv_b;
                std::fill(sum.begin(), sum.end(), 0.0);
                std::fill(sum_sq.begin(), sum_sq.end(), 0.0);
                std::size_t bad = 0;
                std::size_t out_count = 0;
                std::size_t seen = 0;

                for (std::size_t p = 0; p < n; ++p) {
                    const bool ok = run_euler_path(model_Q, plan.coeffs, 0.0, va[iv], &z[p * 2 * steps],
                                                   [&](int k, double x, double v) {
                                                       dx[static_cast<std::size_t>(k)] = x;
                                                       vv[static_cast<std::size_t>(k)] = v;
                                                   });
                    if (!ok) {
                        ++bad;
                        continue;
                    }
                    std::fill(y.begin(), y.end(), 0.0);
                    for (std::size_t k = 0; k <= steps; ++k) {
                        const ShiftedLookup look(dx[k], h, nx);
                        if (core_v) {
                            seen += static_cast<std::size_t>(core_x);
                            if (!va.contains(vv[k])) {
                                out_count += static_cast<std::size_t>(core_x);
                            } else {
                                for (long j = cx_a; j <= cx_b; ++j) out_count += look.outside(j) ? 1 : 0;
                            }
                        }
                        if (!include_driver) continue;
                        const RateSnapshot& rs = plan.rs[k];
                        const double weight = plan.weight[k] * plan.discount[k];
                        const double lam = plan.shift[k];
                        blend_row(src, plan.it[k], plan.wt[k], vv[k], row.data());
                        const double growth = std::exp(dx[k]);
                        const bool fast = rs.piecewise_linear && rs.dividend_state_free;
                        for (std::size_t j = 0; j < nx; ++j) {
                            const double s = exp_x[j] * growth;
                            const double u = look(row.data(), static_cast<long>(j));
                            const double bval =
                                fast ? rs.dividend + (u > 0.0 ? rs.slope_pos * u : -rs.slope_neg * u)
                                     : driver_at(spec, rs, s, vv[k], u);
                            y[j] += weight * (bval + lam * u);
                        }
                    }
                    const double growth = std::exp(dx[steps]);
                    const double d_end = plan.discount[steps];
                    if (payoff_end) {
                        for (std::size_t j = 0; j < nx; ++j) y[j] += d_end * spec.payoff(exp_x[j] * growth, vv[steps]);
                    } else {
                        const ShiftedLookup look(dx[steps], h, nx);
                        blend_row(src, it_hi, 0.0, vv[steps], row.data());
                        for (std::size_t j = 0; j < nx; ++j) y[j] += d_end * look(row.data(), static_cast<long>(j));
                    }
                    for (std::size_t j = 0; j < nx; ++j) {
                        sum[j] += y[j];
                        sum_sq[j] += y[j] * y[j];
                    }
                }

                const double m = static_cast<double>(n - bad);
                for (std::size_t j = 0; j < nx; ++j) {
                    const double mean = m > 0 ? sum[j] / m : std::numeric_limits<double>::quiet_NaN();
                    const double var = m > 1 ? std::max(0.0, (sum_sq[j] - m * mean * mean) / (m - 1.0)) : 0.0;
                    const std::size_t idx = res.u.index(it, j, iv);
                    res.u.values()[idx] = mean;
                    res.stderr_[idx] = std::sqrt(var / std::max(1.0, m));
                }
                invalid[pair] = bad;
                outside[pair] = out_count;
                visited[pair] = seen;
            }
        },
        mc.threads);

    std::size_t out_total = 0;
    std::size_t seen_total = 0;
    for (std::size_t pair = 0; pair < n_pairs; ++pair) {
        if (static_cast<double>(invalid[pair]) > kInvalidPathBudget * static_cast<double>(n)) {
            throw InvalidPathBudget(invalid[pair], n);
        }
        res.invalid_paths += invalid[pair];
        out_total += outside[pair];
        seen_total += visited[pair];
    }
    res.coverage_fraction = seen_total == 0 ? 0.0 : static_cast<double>(out_total) / static_cast<double>(seen_total);
    if (res.coverage_fraction > mc.coverage_limit) throw CoverageError(res.coverage_fraction, mc.coverage_limit);
    for (std::size_t it = it_lo; it < it_hi; ++it) {
        for (std::size_t iv = 0; iv < nv; ++iv) {
            for (std::size_t j = 0; j < nx; ++j) {
                if (!std::isfinite(res.u.at(it, j, iv))) {
                    throw NumericalError("feynman_kac: non-finite estimate at node (" + std::to_string(it) + ", " +
                                         std::to_string(j) + ", " + std::to_string(iv) + ")");
                }
            }
        }
    }
    return res;
}

ApplyResult feynman_kac_apply(const VolModel& model_Q, const MarketSpec& spec, const GridFunction& u_in,
                              const McConfig& mc) {
    const std::size_t last = u_in.nt() - 1;
    if (!is_horizon(u_in.t()[last], spec.horizon)) throw DomainError("feynman_kac: last time node must be T");
    return feynman_kac_slab(model_Q, spec, u_in, mc, 0, last, true);
}

GridFunction make_solver_grid(const MarketSpec& spec, const SolverGrid& grid, const SolverConfig& config) {
    grid.validate();
    if (!is_horizon(grid.T, spec.horizon)) throw DomainError("solver grid: T must equal the market horizon");
    std::vector<double> t = Axis::uniform(grid.t0, grid.T, static_cast<std::size_t>(grid.nt)).nodes();
    for (double b : slab_boundaries(spec, grid.t0, grid.T, config.slab_budget, config.min_slabs)) t.push_back(b);
    std::sort(t.begin(), t.end());
    std::vector<double> merged;
    const double tol = 1e-9 * std::max(1.0, grid.T);
    for (double v : t) {
        if (merged.empty() || v - merged.back() > tol) merged.push_back(v);
    }
    merged.back() = grid.T;
    Axis x = grid.nx == 1 ? Axis({0.5 * (grid.x_lo + grid.x_hi)})
                          : Axis::uniform(grid.x_lo, grid.x_hi, static_cast<std::size_t>(grid.nx));
    Axis v = grid.nv == 1 ? Axis({grid.v_lo}) : Axis::uniform(grid.v_lo, grid.v_hi, static_cast<std::size_t>(grid.nv));
    return GridFunction(Axis(merged), std::move(x), std::move(v), 0.0);
}

PicardResult picard_solve(const VolModel& model_Q, const MarketSpec& spec, const SolverGrid& grid,
                          const McConfig& mc_in, const SolverConfig& config) {
    spec.validate();
    McConfig mc = mc_in;
    mc.monotone_shift = config.monotone_shift;
    if (config.max_iter < 1) throw DomainError("picard: max_iter must be >= 1");
    PicardResult out;
    out.u = make_solver_grid(spec, grid, config);
    const std::size_t last = out.u.nt() - 1;
    set_terminal(out.u, spec.payoff, last);
    out.stderr_.assign(out.u.size(), 0.0);

    const std::vector<double> bounds = slab_boundaries(spec, grid.t0, grid.T, config.slab_budget, config.min_slabs);
    std::vector<std::size_t> slab_index;
    for (double b : bounds) {
        std::size_t i;
        double w;
        out.u.t().locate(b, i, w);
        if (w > 0.5) ++i;
        slab_index.push_back(i);
    }

    PicardReport& rep = out.report;
    rep.converged = true;
    auto copy_slab = [&](const ApplyResult& r, std::size_t lo, std::size_t hi) {
        for (std::size_t it = lo; it < hi; ++it) {
            for (std::size_t iv = 0; iv < out.u.nv(); ++iv) {
                for (std::size_t ix = 0; ix < out.u.nx(); ++ix) {
                    const std::size_t idx = out.u.index(it, ix, iv);
                    out.u.values()[idx] = r.u.values()[idx];
                    out.stderr_[idx] = r.stderr_[idx];
                }
            }
        }
        rep.coverage_fraction = std::max(rep.coverage_fraction, r.coverage_fraction);
    };
    auto slab_stats = [&](const ApplyResult& r, std::size_t lo, std::size_t hi, double& diff, double& floor) {
        diff = 0.0;
        std::vector<double> errs;
        for (std::size_t it = lo; it < hi; ++it) {
            for (std::size_t iv = 0; iv < out.u.nv(); ++iv) {
                for (std::size_t ix = 0; ix < out.u.nx(); ++ix) {
                    const std::size_t idx = out.u.index(it, ix, iv);
                    diff = std::max(diff, std::abs(r.u.values()[idx] - out.u.values()[idx]));
                    errs.push_back(r.stderr_[idx]);
                }
            }
        }
        floor = median(std::move(errs));
    };

    for (std::size_t sl = slab_index.size() - 1; sl-- > 0;) {
        const std::size_t lo = slab_index[sl];
        const std::size_t hi = slab_index[sl + 1];
        SlabTrace trace;
        trace.t_begin = out.u.t()[lo];
        trace.t_end = out.u.t()[hi];
        trace.lipschitz_integral = lipschitz_integral(spec, trace.t_begin, trace.t_end);

        copy_slab(feynman_kac_slab(model_Q, spec, out.u, mc, lo, hi, false), lo, hi);
        for (int iter = 0; iter < config.max_iter; ++iter) {
            const ApplyResult r = feynman_kac_slab(model_Q, spec, out.u, mc, lo, hi, true);
            double diff, floor;
            slab_stats(r, lo, hi, diff, floor);
            copy_slab(r, lo, hi);
            trace.sup_diffs.push_back(diff);
            trace.noise_floors.push_back(floor);
            rep.sup_diffs.push_back(diff);
            ++rep.iterates;
            rep.mc_stderr_floor = std::max(rep.mc_stderr_floor, floor);
            const double target = config.stop_at_noise_floor ? std::max(config.tol, 3.0 * floor) : config.tol;
            if (diff <= target) {
                trace.converged = true;
                break;
            }
        }
        rep.converged = rep.converged && trace.converged;
        rep.slabs.insert(rep.slabs.begin(), trace);
    }

    if (config.fresh_validation) {
        McConfig fresh = mc;
        fresh.master_seed = derive_seed(mc.master_seed, 0x7F4A7C15ULL);
        std::size_t over = 0;
        std::size_t count = 0;
        for (std::size_t sl = 0; sl + 1 < slab_index.size(); ++sl) {
            const std::size_t lo = slab_index[sl];
            const std::size_t hi = slab_index[sl + 1];
            const ApplyResult r = feynman_kac_slab(model_Q, spec, out.u, fresh, lo, hi, true);
            for (std::size_t it = lo; it < hi; ++it) {
                for (std::size_t iv = 0; iv < out.u.nv(); ++iv) {
                    for (std::size_t ix = 0; ix < out.u.nx(); ++ix) {
                        const std::size_t idx = out.u.index(it, ix, iv);
                        const double d = std::abs(r.u.values()[idx] - out.u.values()[idx]);
                        const double se = std::hypot(r.stderr_[idx], out.stderr_[idx]);
                        rep.validation_sup_diff = std::max(rep.validation_sup_diff, d);
                        const double z = se > 0.0 ? d / se : (d > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
                        rep.validation_max_z = std::max(rep.validation_max_z, z);
                        over += z > 3.0 ? 1 : 0;
                        ++count;
                    }
                }
            }
        }
        rep.validated = true;
        rep.validation_frac_over_3se = count == 0 ? 0.0 : static_cast<double>(over) / static_cast<double>(count);
    }

    rep.sup_u = out.u.sup_abs();
    double sup_pi = 0.0;
    double lip = 0.0;
    constexpr int kPoints = 200;
    const double dt = (grid.T - grid.t0) / kPoints;
    for (int i = 0; i < kPoints; ++i) {
        const double t = grid.t0 + (i + 0.5) * dt;
        double pi_max = 0.0;
        if (spec.dividend.state_free()) {
            pi_max = std::abs(spec.dividend.level(t));
        } else {
            for (std::size_t ix = 0; ix < out.u.nx(); ++ix) {
                for (std::size_t iv = 0; iv < out.u.nv(); ++iv) {
                    pi_max = std::max(pi_max, std::abs(spec.dividend(t, std::exp(out.u.x()[ix]), out.u.v()[iv])));
                }
            }
        }
        sup_pi += pi_max * dt;
        lip += driver_lipschitz(spec, t) * dt;
    }
    rep.growth_bound = spec.payoff.sup() + sup_pi + lip * rep.sup_u;
    return out;
}

std::vector<double> pde_residual(const GridFunction& u, const VolModel& model_Q, const MarketSpec& spec,
                                 const std::vector<NodeIndex>& probes) {
    std::vector<double> out;
    out.reserve(probes.size());
    const Axis& ta = u.t();
    const Axis& xa = u.x();
    const Axis& va = u.v();
    auto first = [](double hm, double hp, double fm, double f0, double fp) {
        return (hm * hm * fp - hp * hp * fm + (hp * hp - hm * hm) * f0) / (hp * hm * (hp + hm));
    };
    auto second = [](double hm, double hp, double fm, double f0, double fp) {
        return 2.0 * (hm * fp - (hp + hm) * f0 + hp * fm) / (hp * hm * (hp + hm));
    };
    for (const NodeIndex& p : probes) {
        if (p.it < 1 || p.it + 1 >= u.nt() || p.ix < 2 || p.ix + 2 >= u.nx() || p.iv < 2 || p.iv + 2 >= u.nv()) {
            throw MarginError("pde_residual: probe (" + std::to_string(p.it) + ", " + std::to_string(p.ix) + ", " +
                              std::to_string(p.iv) + ") is too close to the grid boundary");
        }
        const double t = ta[p.it];
        const double x = xa[p.ix];
        const double v = va[p.iv];
        const double f0 = u.at(p.it, p.ix, p.iv);
        const double htm = t - ta[p.it - 1], htp = ta[p.it + 1] - t;
        const double hxm = x - xa[p.ix - 1], hxp = xa[p.ix + 1] - x;
        const double hvm = v - va[p.iv - 1], hvp = va[p.iv + 1] - v;
        const double u_t = first(htm, htp, u.at(p.it - 1, p.ix, p.iv), f0, u.at(p.it + 1, p.ix, p.iv));
        const double xm = u.at(p.it, p.ix - 1, p.iv), xp = u.at(p.it, p.ix + 1, p.iv);
        const double vm = u.at(p.it, p.ix, p.iv - 1), vp = u.at(p.it, p.ix, p.iv + 1);
        const double u_x = first(hxm, hxp, xm, f0, xp);
        const double u_xx = second(hxm, hxp, xm, f0, xp);
        const double u_v = first(hvm, hvp, vm, f0, vp);
        const double u_vv = second(hvm, hvp, vm, f0, vp);
        const double u_xv = (u.at(p.it, p.ix + 1, p.iv + 1) - u.at(p.it, p.ix + 1, p.iv - 1) -
                             u.at(p.it, p.ix - 1, p.iv + 1) + u.at(p.it, p.ix - 1, p.iv - 1)) /
                            ((hxp + hxm) * (hvp + hvm));
        const double th = model_Q.theta(t, v);
        const double eta = model_Q.eta(t, v);
        const double rho = model_Q.correlation(t);
        const double lu = (model_Q.drift_b(t) - 0.5 * th * th) * u_x + model_Q.zeta(t, v) * u_v +
                          0.5 * th * th * u_xx + rho * th * eta * u_xv + 0.5 * eta * eta * u_vv;
        out.push_back(u_t + lu + driver(spec, t, std::exp(x), v, f0));
    }
    return out;
}

OracleValue linear_oracle(const AffineDriver& drv, const VolModel& model_Q, const Payoff& phi, double T, double s,
                          double x, double v, const OracleMc& mc) {
    OracleValue out;
    const double growth = std::exp(drv.m.integral(s, T));
    const double forcing =
        s < T ? integrate([&](double t) { return std::exp(drv.m.integral(s, t)) * drv.a(t); }, s, T, 1e-10) : 0.0;
    if (!(s < T)) {
        out.value = phi(std::exp(x), v);
        return out;
    }
    const TimeGrid grid{s, T, mc.n_steps};
    const StepCoefficients coeffs = step_coefficients(model_Q, grid);
    const auto steps = static_cast<std::size_t>(mc.n_steps);
    std::vector<double> payoff(mc.n_paths, 0.0);
    std::vector<std::uint8_t> valid(mc.n_paths, 0);
    parallel_for(
        mc.n_paths,
        [&](std::size_t begin, std::size_t end) {
            std::vector<double> z(2 * steps);
            for (std::size_t p = begin; p < end; ++p) {
                fill_normals(mc.seed, p, z.data(), z.size());
                double xt = x, vt = v;
                valid[p] = run_euler_path(model_Q, coeffs, x, v, z.data(), [&](int, double xx, double vv) {
                    xt = xx;
                    vt = vv;
                });
                payoff[p] = phi(std::exp(xt), vt);
            }
        },
        mc.threads);
    double sum = 0.0, sum_sq = 0.0, n = 0.0;
    for (std::size_t p = 0; p < mc.n_paths; ++p) {
        if (!valid[p]) continue;
        sum += payoff[p];
        sum_sq += payoff[p] * payoff[p];
        n += 1.0;
    }
    if (n < 2.0) throw NumericalError("linear_oracle: too few valid paths");
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    out.value = growth * mean + forcing;
    out.stderr_ = growth * std::sqrt(var / n);
    return out;
}

ComparisonReport compare_solutions(const PicardResult& lo, const PicardResult& hi) {
    if (lo.u.size() != hi.u.size()) throw DomainError("comparison: grids differ");
    ComparisonReport rep;
    rep.nodes = lo.u.size();
    rep.min_gap = std::numeric_limits<double>::infinity();
    rep.max_gap = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rep.nodes; ++i) {
        const double gap = hi.u.values()[i] - lo.u.values()[i];
        const double se = std::hypot(lo.stderr_[i], hi.stderr_[i]);
        rep.min_gap = std::min(rep.min_gap, gap);
        rep.max_gap = std::max(rep.max_gap, gap);
        if (gap < -3.0 * se) ++rep.violations;
    }
    rep.fraction = rep.nodes == 0 ? 0.0 : static_cast<double>(rep.violations) / static_cast<double>(rep.nodes);
    rep.pass = rep.violations == 0;
    return rep;
}

ComparisonReport comparison_check(const VolModel& model_Q, const MarketSpec& spec_lo, const MarketSpec& spec_hi,
                                  const SolverGrid& grid, const McConfig& mc, const SolverConfig& config) {
    const PicardResult lo = picard_solve(model_Q, spec_lo, grid, mc, config);
    const PicardResult hi = picard_solve(model_Q, spec_hi, grid, mc, config);
    return compare_solutions(lo, hi);
}

Hull auto_hull(const VolModel& model_Q, double t0, double T, double x0, double v0, std::size_t n_paths,
               std::uint64_t seed, int n_steps, double expand) {
    const TimeGrid grid{t0, T, n_steps};
    grid.validate();
    const StepCoefficients coeffs = step_coefficients(model_Q, grid);
    const auto nodes = static_cast<std::size_t>(n_steps) + 1;
    std::vector<double> xs(n_paths * nodes, x0);
    std::vector<double> vs(n_paths * nodes, v0);
    parallel_for(n_paths, [&](std::size_t begin, std::size_t end) {
        std::vector<double> z(2 * static_cast<std::size_t>(n_steps));
        for (std::size_t p = begin; p < end; ++p) {
            fill_normals(seed, p, z.data(), z.size());
            run_euler_path(model_Q, coeffs, x0, v0, z.data(), [&](int k, double x, double v) {
                xs[p * nodes + static_cast<std::size_t>(k)] = x;
                vs[p * nodes + static_cast<std::size_t>(k)] = v;
            });
        }
    });
    auto quantile = [](std::vector<double>& data, double q) {
        const auto k = static_cast<std::size_t>(q * static_cast<double>(data.size() - 1));
        std::nth_element(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(k), data.end());
        return data[k];
    };
    const double qx_lo = quantile(xs, 0.001);
    const double qx_hi = quantile(xs, 0.999);
    const double qv_lo = quantile(vs, 0.001);
    const double qv_hi = quantile(vs, 0.999);

    Hull hull;
    double wx = expand * std::max(x0 - qx_lo, qx_hi - x0);
    if (!(wx > 1e-6)) wx = 0.1;
    hull.x_lo = x0 - wx;
    hull.x_hi = x0 + wx;
    if (qv_hi - qv_lo <= 1e-12 * std::max(1.0, v0)) {
        hull.v_lo = 0.5 * v0;
        hull.v_hi = 1.5 * v0;
    } else {
        const double floor = 0.25 * (qv_lo > 0.0 ? qv_lo : 1e-3 * v0);
        hull.v_lo = std::max(v0 - expand * (v0 - qv_lo), floor);
        hull.v_hi = v0 + expand * (qv_hi - v0);
    }
    return hull;
}

} // namespace xva
