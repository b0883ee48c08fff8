#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "xva/simulate.hpp"
#include "xva/special.hpp"
#include "xva/time_function.hpp"

namespace xva {

enum class Party { investor, counterparty };

std::string to_string(Party party);

/// Default of one party: tau = inf{t : int_0^t intensity >= xi}, xi ~ Gamma(shape, rate).
/// A zero intensity means the party never defaults.
struct PartyDefault {
    TimeFunction intensity{0.0};
    GammaParams threshold;

    void validate(double horizon) const;
    double cumulative(double t) const { return intensity.integral(0.0, t); }
    /// G_t(tau_i) with the exact cumulative intensity.
    double survival(double t) const;
    /// -G'/G = intensity(t) * gamma_hazard_factor(threshold, cumulative(t)).
    double hazard(double t) const;
    bool never_defaults(double horizon) const { return intensity.sup_abs(0.0, horizon) == 0.0; }
};

struct DefaultSpec {
    PartyDefault investor;
    PartyDefault counterparty;
    double horizon = 1.0;

    void validate() const;
    const PartyDefault& party(Party p) const { return p == Party::investor ? investor : counterparty; }
    /// G_t(tau) = G_t(tau_I) G_t(tau_C).
    double joint_survival(double t) const { return investor.survival(t) * counterparty.survival(t); }
};

struct SurvivalCurve {
    std::vector<double> nodes;
    std::vector<double> cumulative_I;
    std::vector<double> cumulative_C;
    std::vector<double> g_I;
    std::vector<double> g_C;
    std::vector<double> g_joint;
};

/// Survival on the grid with cumulative intensities by the trapezoid rule.
SurvivalCurve survival_curve(const DefaultSpec& spec, const TimeGrid& grid);

struct HazardCurve {
    std::vector<double> nodes;
    std::vector<double> hazard_I;
    std::vector<double> hazard_C;
};

HazardCurve hazard_curve(const DefaultSpec& spec, const TimeGrid& grid);

inline constexpr double kNeverDefaults = std::numeric_limits<double>::infinity();

struct DefaultSamples {
    std::vector<double> tau_I; // grid node times or kNeverDefaults
    std::vector<double> tau_C;
    std::size_t ties = 0;      // samples with tau_I == tau_C < inf
    double tie_bound = 0.0;    // expected tie fraction from grid mass collisions
};

DefaultSamples sample_default_times(const DefaultSpec& spec, const TimeGrid& grid, std::size_t n_samples,
                                    std::uint64_t seed, int threads = 0);

/// Fraction of samples with tau > t at each node.
std::vector<double> empirical_survival(const std::vector<double>& tau, const std::vector<double>& nodes);

enum class DensityTarget { joint, investor, counterparty };

struct DensityResult {
    std::vector<double> nodes;
    std::vector<double> phi;  // density of the first default rho on the grid
    double integral = 0.0;    // int of the exact density, Gauss-Legendre per cell
    double atom = 0.0;        // P(rho = inf) = G_T
    double identity_gap = 0.0; // |integral + atom - 1|
};

DensityResult default_density(const DefaultSpec& spec, const TimeGrid& grid,
                              DensityTarget target = DensityTarget::joint);

} // namespace xva
