#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "xva/default_clock.hpp"
#include "xva/grid_function.hpp"
#include "xva/simulate.hpp"
#include "xva/time_function.hpp"
#include "xva/vol_model.hpp"

namespace xva {

/// Terminal payoff phi(s, v) >= 0, bounded. `offset` is added to every kind.
struct Payoff {
    enum class Kind { constant, capped_call, put, callable };
    Kind kind = Kind::constant;
    double value = 0.0;  // constant
    double strike = 0.0; // capped_call, put
    double cap = 0.0;    // capped_call: min((s - K)+, cap)
    double offset = 0.0;
    std::function<double(double s, double v)> fn; // callable
    double declared_sup = 0.0;                    // callable

    double operator()(double s, double v) const;
    double sup() const;
    void validate() const;
};

/// Hedging functional H(t, s, v, y).
struct Hedge {
    enum class Kind { none, proportional, callable };
    Kind kind = Kind::none;
    TimeFunction delta{0.0}; // proportional: H = delta(t) y
    std::function<double(double t, double s, double v, double y)> fn;
    double lipschitz = 0.0;  // callable: Lipschitz constant in y

    double operator()(double t, double s, double v, double y) const;
};

/// Dividend pi(t, s, v).
struct Dividend {
    enum class Kind { constant, callable };
    Kind kind = Kind::constant;
    TimeFunction level{0.0};
    std::function<double(double t, double s, double v)> fn;

    double operator()(double t, double s, double v) const;
    bool state_free() const { return kind == Kind::constant; }
};

struct MarketSpec {
    TimeFunction r_hat{0.0};
    TimeFunction c_plus{0.0}, c_minus{0.0};
    TimeFunction f_plus{0.0}, f_minus{0.0};
    TimeFunction h_plus{0.0}, h_minus{0.0};
    TimeFunction alpha_frac{1.0};
    TimeFunction beta_frac{1.0};
    double lgd_I = 0.0;
    double lgd_C = 0.0;
    bool investor_is_bank = false;
    Dividend dividend;
    Hedge hedge;
    Payoff payoff;
    DefaultSpec defaults;
    double horizon = 1.0;

    /// Throws InvariantViolation naming the failed condition.
    void validate() const;
};

/// Everything in the driver that depends on t only. With a linear hedge the
/// driver is pi + slope_pos y+ + slope_neg y-.
struct RateSnapshot {
    double t = 0.0;
    double r = 0.0, c_plus = 0.0, c_minus = 0.0, f_plus = 0.0, f_minus = 0.0, h_plus = 0.0, h_minus = 0.0;
    double alpha = 1.0, beta = 1.0;
    double g_I = 0.0, g_C = 0.0;   // G'/G per party, <= 0
    double survival = 1.0;         // G_t(tau)
    double delta = 0.0;            // proportional hedge ratio
    bool piecewise_linear = true;  // hedge is none or proportional
    double slope_pos = 0.0;
    double slope_neg = 0.0;
    double dividend = 0.0;         // valid when the dividend is state-free
    bool dividend_state_free = true;
};

RateSnapshot snapshot(const MarketSpec& spec, double t);

/// exp(-int_s^t r); 1 when s > t.
double discount(const TimeFunction& r, double s, double t);

/// Driver exactly as printed, with y+ / y- and H+ / H-. Throws DomainError
/// for s <= 0 or v <= 0.
double driver(const MarketSpec& spec, double t, double s, double v, double y);

/// Driver from a precomputed snapshot; no domain checks.
double driver_at(const MarketSpec& spec, const RateSnapshot& rs, double s, double v, double y);

/// G_t(tau) (B(t, s, v, y) + (r - g_I - g_C)(t) y) with G read from the curve.
double a_process_increment(const MarketSpec& spec, const SurvivalCurve& curve, double t, double s, double v,
                           double y);

/// Same with the exact joint survival of spec.defaults.
double a_process_increment(const MarketSpec& spec, double t, double s, double v, double y);

/// Lipschitz constant of y -> B(t, ., ., y).
double driver_lipschitz(const MarketSpec& spec, double t);

/// Slab boundaries t0 = b_0 < ... < b_m = T with int lambda_B <= budget on each
/// slab and at least min_slabs slabs.
std::vector<double> slab_boundaries(const MarketSpec& spec, double t0, double T, double budget, int min_slabs);

struct AffineDriver {
    TimeFunction a; // B = a(t) + m(t) y
    TimeFunction m;
};

/// The driver in affine form when it is affine in y with a state-free dividend.
std::optional<AffineDriver> affine_form(const MarketSpec& spec);

struct BoundaryReport {
    bool holds = false;
    double lower = 0.0;        // inf J
    double upper = 0.0;        // sup J
    double min_at_lower = 0.0; // inf of B(., lower) on the sample
    double max_at_upper = 0.0; // sup of B(., upper) on the sample
    bool nonnegativity = false;
    std::size_t samples = 0;
};

/// Checks B(., lower) >= 0 and B(., upper) <= 0 on a sampled (t, s, v) lattice.
BoundaryReport check_boundary(const MarketSpec& spec, double lower, double upper, const std::vector<double>& s_values,
                              const std::vector<double>& v_values, int n_times = 41);

struct ResidualOptions {
    int n_steps = 200;
    double coverage_limit = 0.01;
    int threads = 0;
};

struct ResidualReport {
    std::vector<double> checkpoints; // snapped to the simulation grid
    std::vector<double> mean;        // mean of M(c_{j+1}) - M(c_j)
    std::vector<double> stderr_;
    std::size_t n = 0;
    double coverage_fraction = 0.0;
    double max_abs_z = 0.0;
};

/// Monte Carlo test of the martingale property of
/// M_t = D_{t0,t} V_t G_t + int D dA with V_t = u(t, X_t, V_t) (phi at T).
ResidualReport martingale_residual(const MarketSpec& spec, const VolModel& model_Q, const GridFunction& u,
                                   double t0, double x0, double v0, const std::vector<double>& checkpoints,
                                   std::size_t n_paths, std::uint64_t seed, const ResidualOptions& options = {});

} // namespace xva
