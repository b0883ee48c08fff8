#include "xva/default_clock.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "xva/errors.hpp"
#include "xva/parallel.hpp"

namespace xva {

namespace {

std::vector<double> trapezoid_cumulative(const TimeFunction& f, const TimeGrid& grid) {
    std::vector<double> out(static_cast<std::size_t>(grid.n_steps) + 1, 0.0);
    const double dt = grid.dt();
    double prev = f(grid.node(0));
    // Cumulative intensity is measured from time zero.
    out[0] = grid.t0 > 0.0 ? f.integral(0.0, grid.t0) : 0.0;
    for (int k = 1; k <= grid.n_steps; ++k) {
        const double cur = f(grid.node(k));
        out[static_cast<std::size_t>(k)] = out[static_cast<std::size_t>(k) - 1] + 0.5 * (prev + cur) * dt;
        prev = cur;
    }
    return out;
}

std::vector<double> node_times(const TimeGrid& grid) {
    std::vector<double> t(static_cast<std::size_t>(grid.n_steps) + 1);
    for (int k = 0; k <= grid.n_steps; ++k) t[static_cast<std::size_t>(k)] = grid.node(k);
    return t;
}

double hazard_from(const PartyDefault& p, double t, double cumulative) {
    const double lambda = p.intensity(t);
    if (lambda == 0.0) return 0.0;
    return lambda * gamma_hazard_factor(p.threshold, cumulative);
}

// Probability mass the grid sampler puts on each node.
std::vector<double> node_masses(const std::vector<double>& survival) {
    std::vector<double> mass(survival.size(), 0.0);
    for (std::size_t k = 1; k < survival.size(); ++k) mass[k] = survival[k - 1] - survival[k];
    return mass;
}

} // namespace

std::string to_string(Party party) { return party == Party::investor ? "investor" : "counterparty"; }

void PartyDefault::validate(double horizon) const {
    threshold.validate();
    if (intensity.inf(0.0, horizon) < 0.0) throw InvariantViolation("intensity_nonnegative", "intensity must be >= 0");
    const double total = cumulative(horizon);
    if (!std::isfinite(total)) throw InvariantViolation("intensity_integrable", "int_0^T intensity must be finite");
}

double PartyDefault::survival(double t) const { return gamma_survival(threshold, cumulative(t)); }

double PartyDefault::hazard(double t) const { return hazard_from(*this, t, cumulative(t)); }

void DefaultSpec::validate() const {
    if (!(horizon > 0.0)) throw DomainError("default spec: horizon must be positive");
    investor.validate(horizon);
    counterparty.validate(horizon);
}

SurvivalCurve survival_curve(const DefaultSpec& spec, const TimeGrid& grid) {
    grid.validate();
    SurvivalCurve c;
    c.nodes = node_times(grid);
    c.cumulative_I = trapezoid_cumulative(spec.investor.intensity, grid);
    c.cumulative_C = trapezoid_cumulative(spec.counterparty.intensity, grid);
    const std::size_t n = c.nodes.size();
    c.g_I.resize(n);
    c.g_C.resize(n);
    c.g_joint.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        c.g_I[k] = gamma_survival(spec.investor.threshold, c.cumulative_I[k]);
        c.g_C[k] = gamma_survival(spec.counterparty.threshold, c.cumulative_C[k]);
        c.g_joint[k] = c.g_I[k] * c.g_C[k];
    }
    return c;
}

HazardCurve hazard_curve(const DefaultSpec& spec, const TimeGrid& grid) {
    grid.validate();
    HazardCurve h;
    h.nodes = node_times(grid);
    const auto cum_I = trapezoid_cumulative(spec.investor.intensity, grid);
    const auto cum_C = trapezoid_cumulative(spec.counterparty.intensity, grid);
    h.hazard_I.resize(h.nodes.size());
    h.hazard_C.resize(h.nodes.size());
    for (std::size_t k = 0; k < h.nodes.size(); ++k) {
        h.hazard_I[k] = hazard_from(spec.investor, h.nodes[k], cum_I[k]);
        h.hazard_C[k] = hazard_from(spec.counterparty, h.nodes[k], cum_C[k]);
    }
    return h;
}

DefaultSamples sample_default_times(const DefaultSpec& spec, const TimeGrid& grid, std::size_t n_samples,
                                    std::uint64_t seed, int threads) {
    grid.validate();
    const std::vector<double> nodes = node_times(grid);
    const auto cum_I = trapezoid_cumulative(spec.investor.intensity, grid);
    const auto cum_C = trapezoid_cumulative(spec.counterparty.intensity, grid);

    DefaultSamples s;
    s.tau_I.assign(n_samples, kNeverDefaults);
    s.tau_C.assign(n_samples, kNeverDefaults);

    auto first_hit = [&nodes](const std::vector<double>& cum, double xi) {
        const auto it = std::lower_bound(cum.begin(), cum.end(), xi);
        return it == cum.end() ? kNeverDefaults : nodes[static_cast<std::size_t>(it - cum.begin())];
    };

    parallel_for(
        n_samples,
        [&](std::size_t begin, std::size_t end) {
            std::gamma_distribution<double> xi_I(spec.investor.threshold.shape, 1.0 / spec.investor.threshold.rate);
            std::gamma_distribution<double> xi_C(spec.counterparty.threshold.shape,
                                                 1.0 / spec.counterparty.threshold.rate);
            for (std::size_t i = begin; i < end; ++i) {
                auto rng = make_rng(seed, i);
                const double a = xi_I(rng);
                const double b = xi_C(rng);
                xi_I.reset();
                xi_C.reset();
                s.tau_I[i] = first_hit(cum_I, a);
                s.tau_C[i] = first_hit(cum_C, b);
            }
        },
        threads);

    for (std::size_t i = 0; i < n_samples; ++i) {
        if (std::isfinite(s.tau_I[i]) && s.tau_I[i] == s.tau_C[i]) ++s.ties;
    }
    std::vector<double> g_I(cum_I.size());
    std::vector<double> g_C(cum_C.size());
    for (std::size_t k = 0; k < cum_I.size(); ++k) {
        g_I[k] = gamma_survival(spec.investor.threshold, cum_I[k]);
        g_C[k] = gamma_survival(spec.counterparty.threshold, cum_C[k]);
    }
    const auto m_I = node_masses(g_I);
    const auto m_C = node_masses(g_C);
    for (std::size_t k = 0; k < m_I.size(); ++k) s.tie_bound += m_I[k] * m_C[k];
    return s;
}

std::vector<double> empirical_survival(const std::vector<double>& tau, const std::vector<double>& nodes) {
    std::vector<double> sorted = tau;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> out(nodes.size(), 0.0);
    if (sorted.empty()) return out;
    const double n = static_cast<double>(sorted.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const auto it = std::upper_bound(sorted.begin(), sorted.end(), nodes[k]);
        out[k] = static_cast<double>(sorted.end() - it) / n;
    }
    return out;
}

DensityResult default_density(const DefaultSpec& spec, const TimeGrid& grid, DensityTarget target) {
    const SurvivalCurve curve = survival_curve(spec, grid);
    const HazardCurve hz = hazard_curve(spec, grid);
    DensityResult d;
    d.nodes = curve.nodes;
    d.phi.resize(d.nodes.size());
    const bool use_I = target != DensityTarget::counterparty;
    const bool use_C = target != DensityTarget::investor;
    for (std::size_t k = 0; k < d.nodes.size(); ++k) {
        const double g = (use_I ? curve.g_I[k] : 1.0) * (use_C ? curve.g_C[k] : 1.0);
        const double h = (use_I ? hz.hazard_I[k] : 0.0) + (use_C ? hz.hazard_C[k] : 0.0);
        d.phi[k] = g * h;
    }
    // Integral of the exact density by 3-point Gauss-Legendre on every cell;
    // cell interiors avoid the jumps of piecewise intensities at nodes.
    auto survival = [&](double t) {
        return (use_I ? spec.investor.survival(t) : 1.0) * (use_C ? spec.counterparty.survival(t) : 1.0);
    };
    auto density = [&](double t) {
        return survival(t) * ((use_I ? spec.investor.hazard(t) : 0.0) + (use_C ? spec.counterparty.hazard(t) : 0.0));
    };
    constexpr double kNode = 0.7745966692414834; // sqrt(3/5)
    for (std::size_t k = 1; k < d.nodes.size(); ++k) {
        const double mid = 0.5 * (d.nodes[k - 1] + d.nodes[k]);
        const double half = 0.5 * (d.nodes[k] - d.nodes[k - 1]);
        d.integral += half * (5.0 * density(mid - kNode * half) + 8.0 * density(mid) + 5.0 * density(mid + kNode * half)) / 9.0;
    }
    const std::size_t last = d.nodes.size() - 1;
    const double g_first = survival(d.nodes.front());
    d.atom = survival(d.nodes[last]);
    // Mass already gone before the grid starts is not part of the density.
    d.identity_gap = std::abs(d.integral + d.atom - g_first);
    return d;
}

} // namespace xva
