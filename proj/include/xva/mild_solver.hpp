#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xva/grid_function.hpp"
#include "xva/valuation.hpp"
#include "xva/vol_model.hpp"

namespace xva {

struct McConfig {
    std::size_t n_paths = 4000;
    std::uint64_t master_seed = 1;
    int node_steps = 20;          // Euler steps from every node to its slab end
    double coverage_limit = 0.01; // share of core-node states allowed outside the hull
    double core_fraction = 0.25;  // core nodes keep this share of each range to every face
    // Apply the operator to B + lambda y with the semigroup discounted by
    // lambda, the smallest shift making B + lambda y nondecreasing in y.
    bool monotone_shift = false;
    int threads = 0;
};

/// Rectangular solver grid: nt uniform time nodes on [t0, T] (slab boundaries
/// are added), uniform x and v axes.
struct SolverGrid {
    double t0 = 0.0;
    double T = 1.0;
    int nt = 5;
    int nx = 33;
    int nv = 5;
    double x_lo = 0.0, x_hi = 1.0;
    double v_lo = 0.01, v_hi = 0.1;

    void validate() const;
};

struct SolverConfig {
    int max_iter = 30;
    double tol = 1e-6;
    double slab_budget = 0.5; // int lambda_B per slab
    int min_slabs = 1;
    bool stop_at_noise_floor = true;
    bool fresh_validation = true;
    // Iterate the shifted operator (see McConfig). Same fixed point; every
    // estimate stays inside any interval the driver points into.
    bool monotone_shift = true;
};

struct ApplyResult {
    GridFunction u;
    std::vector<double> stderr_; // same layout as u.values()
    double coverage_fraction = 0.0;
    std::size_t invalid_paths = 0;
};

/// u(s, x, v) = E[u_end(X_b, V_b)] + E int_s^b B(t, e^X, V, u_in(t, X, V)) dt (in
/// its shifted form when mc.monotone_shift is set) on
/// nodes with time index in [it_lo, it_hi), where b = t_nodes[it_hi] and
/// u_end is phi at the horizon and u_in at t_nodes[it_hi] otherwise. Other
/// nodes are copied from u_in. All nodes share the per-path normals of
/// mc.master_seed; the x axis must be uniform.
ApplyResult feynman_kac_slab(const VolModel& model_Q, const MarketSpec& spec, const GridFunction& u_in,
                             const McConfig& mc, std::size_t it_lo, std::size_t it_hi, bool include_driver = true);

/// Full-horizon application: every node runs to T with phi as terminal value
/// and nodes at T hold phi exactly.
ApplyResult feynman_kac_apply(const VolModel& model_Q, const MarketSpec& spec, const GridFunction& u_in,
                              const McConfig& mc);

struct SlabTrace {
    double t_begin = 0.0;
    double t_end = 0.0;
    double lipschitz_integral = 0.0;
    std::vector<double> sup_diffs;
    std::vector<double> noise_floors; // median node stderr per iterate
    bool converged = false;
};

struct PicardReport {
    int iterates = 0;
    std::vector<double> sup_diffs;
    bool converged = false;
    double mc_stderr_floor = 0.0;
    std::vector<SlabTrace> slabs;
    double sup_u = 0.0;
    double growth_bound = 0.0;
    double coverage_fraction = 0.0;
    bool validated = false;
    double validation_sup_diff = 0.0;
    double validation_max_z = 0.0;
    double validation_frac_over_3se = 0.0;
};

struct PicardResult {
    GridFunction u;
    std::vector<double> stderr_;
    PicardReport report;
};

/// Axes for a solver grid, including slab boundaries in the time axis.
GridFunction make_solver_grid(const MarketSpec& spec, const SolverGrid& grid, const SolverConfig& config);

PicardResult picard_solve(const VolModel& model_Q, const MarketSpec& spec, const SolverGrid& grid,
                          const McConfig& mc, const SolverConfig& config);

struct NodeIndex {
    std::size_t it = 0, ix = 0, iv = 0;
};

/// u_t + L u + B(t, e^x, v, u) by central differences at grid nodes.
/// Needs one node of margin in t and two in x and v (MarginError otherwise).
std::vector<double> pde_residual(const GridFunction& u, const VolModel& model_Q, const MarketSpec& spec,
                                 const std::vector<NodeIndex>& probes);

struct OracleValue {
    double value = 0.0;
    double stderr_ = 0.0;
};

struct OracleMc {
    std::size_t n_paths = 20000;
    std::uint64_t seed = 7;
    int n_steps = 100;
    int threads = 0;
};

/// e^{int_s^T m} E[phi] + int_s^T e^{int_s^t m} a(t) dt with E[phi] by direct MC.
OracleValue linear_oracle(const AffineDriver& driver, const VolModel& model_Q, const Payoff& phi, double T,
                          double s, double x, double v, const OracleMc& mc);

struct ComparisonReport {
    std::size_t nodes = 0;
    std::size_t violations = 0;
    double fraction = 0.0;
    double min_gap = 0.0; // min of u_hi - u_lo
    double max_gap = 0.0;
    bool pass = false;
};

/// Fraction of nodes with u_hi < u_lo - 3 sqrt(se_lo^2 + se_hi^2).
ComparisonReport compare_solutions(const PicardResult& lo, const PicardResult& hi);

ComparisonReport comparison_check(const VolModel& model_Q, const MarketSpec& spec_lo, const MarketSpec& spec_hi,
                                  const SolverGrid& grid, const McConfig& mc, const SolverConfig& config);

struct Hull {
    double x_lo = 0.0, x_hi = 0.0, v_lo = 0.0, v_hi = 0.0;
};

/// Grid hull from the 0.1% / 99.9% quantiles of a pilot run, widened around
/// the start point by `expand`.
Hull auto_hull(const VolModel& model_Q, double t0, double T, double x0, double v0, std::size_t n_paths,
               std::uint64_t seed, int n_steps = 100, double expand = 2.0);

} // namespace xva
