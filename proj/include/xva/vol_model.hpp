#pragma once

#include <functional>
#include <string>
#include <vector>

#include "xva/time_function.hpp"

namespace xva {

using TvFunction = std::function<double(double t, double v)>;

/// Regularity properties a model declares about itself. The power family
/// sets them from its parameters; other models assert them.
struct ModelFlags {
    bool theta_continuous = false;    // theta continuous in v
    bool theta_zero_at_zero = false;  // theta(., 0) = 0
    bool theta_nonneg = false;
    bool eta_nonneg_increasing = false;
    bool eta_zero_at_zero = false;
    bool exponential_moment_asserted = false; // integrability of exp(gamma^2/2 int theta^2)
    bool continuity_asserted = false;
};

/// Affine growth constants: zeta(., v) <= k_zeta + l_zeta v for v >= 0 and
/// |theta(., v)| <= k_theta + lambda_theta sqrt(v).
struct GrowthBounds {
    bool known = false;
    double k_zeta = 0.0;
    double l_zeta = 0.0;
    double k_theta = 0.0;
    double lambda_theta = 0.0;
};

/// Coefficients of dX = (b - theta^2/2) dt + theta (sqrt(1-rho^2) dW + rho dW~),
/// dV = zeta dt + eta dW~.
struct VolModel {
    std::string name = "custom";
    TimeFunction drift_b;
    TvFunction theta;
    TvFunction zeta;
    TvFunction eta;
    TimeFunction correlation;
    ModelFlags flags;
    GrowthBounds growth;

    /// Checks |rho| < 1 and finiteness of int (1-rho^2)^-1 on [0, horizon].
    void validate(double horizon) const;
};

struct PowerTerm {
    TimeFunction lambda; // coefficient of |v|^beta in eta
    double beta = 0.5;
};

struct PowerDrift {
    TimeFunction l; // coefficient of (v+)^alpha in zeta, l <= 0
    double alpha = 1.0;
};

/// zeta = k - l0 v+ + sum l_i (v+)^alpha_i,  eta = sum lambda_i |v|^beta_i,
/// theta = theta0 + theta1 sqrt|v|.
struct PowerModel {
    TimeFunction k;
    TimeFunction l0;
    std::vector<PowerDrift> drifts;
    std::vector<PowerTerm> vols;
    TimeFunction theta0;
    TimeFunction theta1{1.0};
    TimeFunction drift_b;
    TimeFunction correlation;
    double horizon = 1.0;

    /// Throws InvariantViolation naming the failed condition. The Feller-type
    /// positivity condition is part of the check only when requested.
    void validate(bool require_positivity = true) const;
};

struct PositivityReport {
    bool holds = false;
    double gamma_star = 0.0;   // min beta_i (infinity when eta == 0)
    double lambda_sum = 0.0;   // sum_i sup |lambda_i|
    double k_inf = 0.0;
    double delta = 0.0;        // factor used in the tested inequality
    std::string witness;       // condition name
    std::string inequality;    // human-readable tested inequality
};

VolModel build_power_model(const PowerModel& params, bool require_positivity = true);

PositivityReport check_positivity(const PowerModel& params);

/// Replaces b by r_hat and zeta by zeta - gamma * eta(t, v+) theta(t, v+).
/// Requires theta continuity and theta(., 0) = 0 flags when gamma > 0.
VolModel measure_change(const VolModel& model, const TimeFunction& r_hat, double gamma);

} // namespace xva
