#include "xva/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "xva/errors.hpp"
#include "xva/parallel.hpp"

namespace xva {

void TimeGrid::validate() const {
    if (!(t0 >= 0.0) || !(T > t0) || !std::isfinite(T)) {
        throw DomainError("time grid: need 0 <= t0 < T");
    }
    if (n_steps < 1) throw DomainError("time grid: n_steps must be >= 1");
}

std::string to_string(Scheme scheme) {
    switch (scheme) {
    case Scheme::euler_full:
        return "euler_full";
    }
    return "unknown";
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::mt19937_64 make_rng(std::uint64_t master, std::uint64_t index) {
    return std::mt19937_64(derive_seed(master, index));
}

void fill_normals(std::uint64_t master, std::uint64_t index, double* out, std::size_t count) {
    auto rng = make_rng(master, index);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t i = 0; i < count; ++i) out[i] = normal(rng);
}

StepCoefficients step_coefficients(const VolModel& model, const TimeGrid& grid) {
    StepCoefficients c;
    c.dt = grid.dt();
    c.sqrt_dt = std::sqrt(c.dt);
    const auto n = static_cast<std::size_t>(grid.n_steps);
    c.t.resize(n);
    c.b.resize(n);
    c.rho.resize(n);
    c.rho_bar.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = grid.node(static_cast<int>(k));
        const double rho = model.correlation(t);
        c.t[k] = t;
        c.b[k] = model.drift_b(t);
        c.rho[k] = rho;
        c.rho_bar[k] = std::sqrt(1.0 - rho * rho);
    }
    return c;
}

PathSet simulate_paths(const VolModel& model, double x0, double v0, const TimeGrid& grid, std::size_t n_paths,
                       std::uint64_t master_seed, const SimulateOptions& options) {
    grid.validate();
    if (!(v0 > 0.0)) throw DomainError("simulate_paths: v0 must be positive");
    if (!std::isfinite(x0)) throw DomainError("simulate_paths: x0 must be finite");
    if (n_paths == 0) throw DomainError("simulate_paths: n_paths must be positive");
    if (options.record_stride < 1) throw DomainError("simulate_paths: record_stride must be >= 1");
    model.validate(grid.T);

    PathSet out;
    out.grid = grid;
    out.master_seed = master_seed;
    out.x0 = x0;
    out.v0 = v0;
    out.n_paths = n_paths;
    out.record_stride = options.record_stride;
    for (int k = 0; k <= grid.n_steps; k += options.record_stride) out.recorded_steps.push_back(k);
    if (out.recorded_steps.back() != grid.n_steps) out.recorded_steps.push_back(grid.n_steps);

    const std::size_t n_nodes = out.recorded_steps.size();
    const auto n_steps = static_cast<std::size_t>(grid.n_steps);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.x.assign(n_paths * n_nodes, nan);
    out.v.assign(n_paths * n_nodes, nan);
    if (options.keep_increments) {
        out.dw_price.assign(n_paths * n_steps, nan);
        out.dw_vol.assign(n_paths * n_steps, nan);
    }
    out.valid.assign(n_paths, 0);
    out.sup_abs_x.assign(n_paths, nan);
    out.sup_abs_dx.assign(n_paths, nan);
    out.min_v.assign(n_paths, nan);
    out.nonpositive_steps.assign(n_paths, 0);

    const StepCoefficients coeffs = step_coefficients(model, grid);

    parallel_for(
        n_paths,
        [&](std::size_t begin, std::size_t end) {
            std::vector<double> z(2 * n_steps);
            for (std::size_t p = begin; p < end; ++p) {
                fill_normals(master_seed, p, z.data(), z.size());
                double* xrow = &out.x[p * n_nodes];
                double* vrow = &out.v[p * n_nodes];
                double sup_x = 0.0;
                double sup_dx = 0.0;
                double min_v = std::numeric_limits<double>::infinity();
                std::uint32_t nonpos = 0;
                std::size_t next = 0;
                const bool ok = run_euler_path(model, coeffs, x0, v0, z.data(), [&](int k, double x, double v) {
                    sup_x = std::max(sup_x, std::abs(x));
                    sup_dx = std::max(sup_dx, std::abs(x - x0));
                    min_v = std::min(min_v, v);
                    if (k > 0 && v <= 0.0) ++nonpos;
                    if (next < n_nodes && out.recorded_steps[next] == k) {
                        xrow[next] = x;
                        vrow[next] = v;
                        ++next;
                    }
                });
                if (options.keep_increments) {
                    for (std::size_t k = 0; k < n_steps; ++k) {
                        const double dw = coeffs.sqrt_dt * z[2 * k];
                        const double dw_v = coeffs.sqrt_dt * z[2 * k + 1];
                        out.dw_price[p * n_steps + k] = coeffs.rho_bar[k] * dw + coeffs.rho[k] * dw_v;
                        out.dw_vol[p * n_steps + k] = dw_v;
                    }
                }
                if (ok) {
                    out.valid[p] = 1;
                    out.sup_abs_x[p] = sup_x;
                    out.sup_abs_dx[p] = sup_dx;
                    out.min_v[p] = min_v;
                    out.nonpositive_steps[p] = nonpos;
                }
            }
        },
        options.threads);

    out.invalid_paths = static_cast<std::size_t>(std::count(out.valid.begin(), out.valid.end(), 0));
    if (options.enforce_budget && static_cast<double>(out.invalid_paths) > kInvalidPathBudget * n_paths) {
        throw InvalidPathBudget(out.invalid_paths, n_paths);
    }
    return out;
}

std::vector<double> exact_price(double chi, const TimeGrid& grid, const double* v_path, const double* dw_price,
                                const TimeFunction& b, const TvFunction& theta) {
    const double dt = grid.dt();
    std::vector<double> s(static_cast<std::size_t>(grid.n_steps) + 1);
    double stoch = 0.0;
    double drift = 0.0;
    s[0] = chi;
    for (int k = 0; k < grid.n_steps; ++k) {
        const double t = grid.node(k);
        const double th = theta(t, v_path[k]);
        stoch += th * dw_price[k];
        drift += (b(t) - 0.5 * th * th) * dt;
        s[static_cast<std::size_t>(k) + 1] = chi * std::exp(stoch + drift);
    }
    return s;
}

std::vector<double> exact_price(const PathSet& paths, std::size_t path, const TimeFunction& b,
                                const TvFunction& theta) {
    if (paths.record_stride != 1 || paths.dw_price.empty()) {
        throw DomainError("exact_price: needs a stride-1 path set with stored increments");
    }
    const auto n_steps = static_cast<std::size_t>(paths.grid.n_steps);
    return exact_price(std::exp(paths.x0), paths.grid, &paths.v[path * paths.n_nodes()],
                       &paths.dw_price[path * n_steps], b, theta);
}

MomentReport moment_report(const PathSet& paths, const VolModel& model) {
    MomentReport r;
    const std::size_t n_nodes = paths.n_nodes();
    const double t0 = paths.grid.t0;
    r.bounds_known = model.growth.known;

    std::size_t n_valid = 0;
    for (std::size_t p = 0; p < paths.n_paths; ++p) n_valid += paths.valid[p];
    if (n_valid < 2) return r;
    const double n = static_cast<double>(n_valid);

    const double k_z = model.growth.k_zeta;
    const double l_z = model.growth.l_zeta;
    for (std::size_t j = 0; j < n_nodes; ++j) {
        double sum = 0.0;
        double sum_sq = 0.0;
        for (std::size_t p = 0; p < paths.n_paths; ++p) {
            if (!paths.valid[p]) continue;
            const double a = std::abs(paths.v_at(p, j));
            sum += a;
            sum_sq += a * a;
        }
        const double mean = sum / n;
        const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
        const double t = paths.time(j);
        const double tau = t - t0;
        const double growth = l_z == 0.0 ? k_z * tau : k_z * std::expm1(l_z * tau) / l_z;
        const double bound = std::exp(l_z * tau) * std::abs(paths.v0) + growth;
        r.times.push_back(t);
        r.mean_abs_v.push_back(mean);
        r.stderr_abs_v.push_back(std::sqrt(var / n));
        r.v_bound.push_back(bound);
        r.sup_mean_v = std::max(r.sup_mean_v, mean);
        const double slack = 3.0 * std::sqrt(var / n) + 1e-12 * (1.0 + bound);
        if (r.bounds_known && mean - bound > slack) r.v_bound_violated = true;
    }

    double sum = 0.0;
    double sum_sq = 0.0;
    double sum_dx = 0.0;
    for (std::size_t p = 0; p < paths.n_paths; ++p) {
        if (!paths.valid[p]) continue;
        sum += paths.sup_abs_x[p];
        sum_sq += paths.sup_abs_x[p] * paths.sup_abs_x[p];
        sum_dx += paths.sup_abs_dx[p];
    }
    r.mean_sup_abs_x = sum / n;
    r.stderr_sup_abs_x = std::sqrt(std::max(0.0, (sum_sq - n * r.mean_sup_abs_x * r.mean_sup_abs_x) / (n - 1.0)) / n);
    r.mean_sup_abs_dx = sum_dx / n;

    const double T = paths.grid.T;
    const double tau = T - t0;
    const TimeFunction& b = model.drift_b;
    const double int_abs_b = integrate([&b](double t) { return std::abs(b(t)); }, t0, T, 1e-10);
    const double kt2 = model.growth.k_theta * model.growth.k_theta * tau;
    const double lt2 = model.growth.lambda_theta * model.growth.lambda_theta * tau;
    const double c0 = int_abs_b + kt2 + 2.0 * std::sqrt(kt2) + std::sqrt(lt2);
    const double c1 = lt2 + std::sqrt(lt2);
    r.x_bound = std::abs(paths.x0) + c0 + c1 * r.sup_mean_v;
    if (r.bounds_known && r.mean_sup_abs_x - r.x_bound > 3.0 * r.stderr_sup_abs_x) r.x_bound_violated = true;
    return r;
}

PositivityStats positivity_report(const PathSet& paths) {
    PositivityStats s;
    s.min_v = std::numeric_limits<double>::infinity();
    std::size_t nonpos = 0;
    std::size_t total = 0;
    for (std::size_t p = 0; p < paths.n_paths; ++p) {
        if (!paths.valid[p]) continue;
        s.min_v = std::min(s.min_v, paths.min_v[p]);
        nonpos += paths.nonpositive_steps[p];
        total += static_cast<std::size_t>(paths.grid.n_steps);
    }
    s.frac_nonpositive = total == 0 ? 0.0 : static_cast<double>(nonpos) / static_cast<double>(total);
    return s;
}

} // namespace xva
