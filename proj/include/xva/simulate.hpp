#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "xva/vol_model.hpp"

namespace xva {

struct TimeGrid {
    double t0 = 0.0;
    double T = 1.0;
    int n_steps = 1;

    void validate() const;
    double dt() const { return (T - t0) / n_steps; }
    double node(int k) const { return k == n_steps ? T : t0 + k * dt(); }
};

enum class Scheme { euler_full };

std::string to_string(Scheme scheme);

/// splitmix64 mix of (master, index); seeds one generator per path.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

std::mt19937_64 make_rng(std::uint64_t master, std::uint64_t index);

/// Draws `count` standard normals from the generator of (master, index).
void fill_normals(std::uint64_t master, std::uint64_t index, double* out, std::size_t count);

/// Per-step time-only coefficients shared by all paths on a grid.
struct StepCoefficients {
    std::vector<double> t;
    std::vector<double> b;
    std::vector<double> rho;
    std::vector<double> rho_bar; // sqrt(1 - rho^2)
    double dt = 0.0;
    double sqrt_dt = 0.0;
};

StepCoefficients step_coefficients(const VolModel& model, const TimeGrid& grid);

/// One Euler path. z holds 2 * n_steps normals (price noise, variance noise per
/// step). visit(k, x, v) is called at every node k = 0..n_steps. Returns false
/// and stops as soon as a state is non-finite.
template <class Visit>
bool run_euler_path(const VolModel& model, const StepCoefficients& c, double x0, double v0, const double* z,
                    Visit&& visit) {
    double x = x0;
    double v = v0;
    visit(0, x, v);
    const std::size_t n = c.t.size();
    for (std::size_t k = 0; k < n; ++k) {
        const double t = c.t[k];
        const double dw = c.sqrt_dt * z[2 * k];
        const double dw_v = c.sqrt_dt * z[2 * k + 1];
        const double th = model.theta(t, v);
        const double dw_price = c.rho_bar[k] * dw + c.rho[k] * dw_v;
        const double v_next = v + model.zeta(t, v) * c.dt + model.eta(t, v) * dw_v;
        x += (c.b[k] - 0.5 * th * th) * c.dt + th * dw_price;
        v = v_next;
        if (!std::isfinite(x) || !std::isfinite(v)) return false;
        visit(static_cast<int>(k + 1), x, v);
    }
    return true;
}

struct SimulateOptions {
    int threads = 0;
    int record_stride = 1;        // keep every stride-th node (and the last)
    bool keep_increments = false; // store price and variance Brownian increments
    bool enforce_budget = true;   // throw InvalidPathBudget beyond 0.1% invalid paths
};

/// Simulated (X, V) trajectories. Rows are paths, columns recorded nodes.
struct PathSet {
    TimeGrid grid;
    Scheme scheme = Scheme::euler_full;
    std::uint64_t master_seed = 0;
    double x0 = 0.0;
    double v0 = 0.0;
    int record_stride = 1;
    std::vector<int> recorded_steps;
    std::size_t n_paths = 0;
    std::vector<double> x;
    std::vector<double> v;
    std::vector<double> dw_price; // [path][step], when kept
    std::vector<double> dw_vol;

    // Per-path statistics over every step, recorded or not.
    std::vector<std::uint8_t> valid;
    std::vector<double> sup_abs_x;
    std::vector<double> sup_abs_dx;
    std::vector<double> min_v;
    std::vector<std::uint32_t> nonpositive_steps;
    std::size_t invalid_paths = 0;

    std::size_t n_nodes() const { return recorded_steps.size(); }
    double time(std::size_t j) const { return grid.node(recorded_steps[j]); }
    double x_at(std::size_t path, std::size_t j) const { return x[path * n_nodes() + j]; }
    double v_at(std::size_t path, std::size_t j) const { return v[path * n_nodes() + j]; }
};

inline constexpr double kInvalidPathBudget = 1e-3;

PathSet simulate_paths(const VolModel& model, double x0, double v0, const TimeGrid& grid, std::size_t n_paths,
                       std::uint64_t master_seed, const SimulateOptions& options = {});

/// S_k = chi exp(sum_j theta dW^_j + sum_j (b - theta^2/2) dt), j < k, on the
/// given variance path and price increments.
std::vector<double> exact_price(double chi, const TimeGrid& grid, const double* v_path, const double* dw_price,
                                const TimeFunction& b, const TvFunction& theta);

/// exact_price for one path of a PathSet recorded with stride 1 and increments.
std::vector<double> exact_price(const PathSet& paths, std::size_t path, const TimeFunction& b,
                                const TvFunction& theta);

struct MomentReport {
    bool bounds_known = false;
    std::vector<double> times;
    std::vector<double> mean_abs_v;
    std::vector<double> stderr_abs_v;
    std::vector<double> v_bound;
    bool v_bound_violated = false;
    double mean_sup_abs_x = 0.0;
    double stderr_sup_abs_x = 0.0;
    double sup_mean_v = 0.0;
    double x_bound = 0.0; // |x0| + c0 + c1 sup E[V]
    bool x_bound_violated = false;
    double mean_sup_abs_dx = 0.0;
};

MomentReport moment_report(const PathSet& paths, const VolModel& model);

struct PositivityStats {
    double min_v = 0.0;
    double frac_nonpositive = 0.0;
};

PositivityStats positivity_report(const PathSet& paths);

} // namespace xva
