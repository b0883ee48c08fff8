#include <cmath>

#include <boost/math/quadrature/gauss.hpp>
#include <gtest/gtest.h>

#include "xva/default_clock.hpp"
#include "xva/errors.hpp"

using namespace xva;

namespace {

PartyDefault party(double intensity, double shape, double rate) {
    PartyDefault d;
    d.intensity = intensity;
    d.threshold = {shape, rate};
    return d;
}

} // namespace

TEST(DefaultClock, ExponentialThresholdSurvival) {
    const PartyDefault d = party(0.1, 1.0, 1.0);
    EXPECT_NEAR(d.survival(1.0), std::exp(-0.1), 1e-15);
    EXPECT_NEAR(d.hazard(0.5), 0.1, 1e-14);
}

TEST(DefaultClock, ShapeTwoHazard) {
    // hazard at t = 1 with unit intensity: e^-1 / Gamma(2, 1) = 1/2
    const PartyDefault d = party(1.0, 2.0, 1.0);
    EXPECT_NEAR(d.hazard(1.0), std::exp(-1.0) / (2.0 * std::exp(-1.0)), 1e-14);
    const double h = 1e-5;
    const double fd = -(std::log(d.survival(1.0 + h)) - std::log(d.survival(1.0 - h))) / (2.0 * h);
    EXPECT_NEAR(d.hazard(1.0), fd, 1e-8);
}

TEST(DefaultClock, CurveMatchesClosedFormAndHazardIntegral) {
    DefaultSpec s;
    s.investor = party(0.05, 1.0, 1.0);
    s.counterparty = party(0.0, 2.5, 3.0);
    s.counterparty.intensity = TimeFunction::callable([](double t) { return 0.2 + 0.6 * t * t; });
    s.horizon = 1.0;
    const TimeGrid g{0.0, 1.0, 400};
    const SurvivalCurve c = survival_curve(s, g);
    const HazardCurve hz = hazard_curve(s, g);
    const PartyDefault& cp = s.counterparty;
    for (std::size_t k = 0; k < c.nodes.size(); k += 40) {
        const double t = c.nodes[k];
        EXPECT_NEAR(c.g_I[k], std::exp(-0.05 * t), 1e-12);
        EXPECT_NEAR(c.g_joint[k], c.g_I[k] * c.g_C[k], 1e-15);
        EXPECT_NEAR(c.g_joint[k], s.joint_survival(t), 1e-6);
        EXPECT_NEAR(hz.hazard_C[k], cp.hazard(t), 1e-5); // trapezoid cumulative intensity
        if (k == 0) continue;
        const double cum = boost::math::quadrature::gauss<double, 30>::integrate(
            [&](double u) { return cp.hazard(u); }, 0.0, t);
        EXPECT_NEAR(c.g_C[k], std::exp(-cum), 1e-6) << t;
    }
}

TEST(DefaultClock, DensityIdentity) {
    DefaultSpec s;
    s.investor = party(0.3, 1.0, 1.0);
    s.counterparty = party(0.5, 2.0, 1.5);
    s.horizon = 2.0;
    const DensityResult d = default_density(s, TimeGrid{0.0, 2.0, 400});
    EXPECT_LE(d.identity_gap, 1e-6);
    EXPECT_NEAR(d.atom, s.joint_survival(2.0), 1e-12);
}

TEST(DefaultClock, NoDefaultsGivesUnitAtom) {
    DefaultSpec s;
    const DensityResult d = default_density(s, TimeGrid{0.0, 1.0, 10});
    for (double v : d.phi) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(d.atom, 1.0);
    EXPECT_TRUE(s.investor.never_defaults(1.0));
}

TEST(DefaultClock, SamplerMatchesAnalyticCurve) {
    DefaultSpec s;
    s.investor = party(0.4, 1.0, 1.0);
    s.counterparty = party(0.8, 2.0, 2.0);
    const TimeGrid g{0.0, 1.0, 100};
    const DefaultSamples smp = sample_default_times(s, g, 100000, 99, 2);
    const SurvivalCurve c = survival_curve(s, g);
    const auto emp_I = empirical_survival(smp.tau_I, c.nodes);
    const auto emp_C = empirical_survival(smp.tau_C, c.nodes);
    double gap = 0.0;
    for (std::size_t k = 0; k < c.nodes.size(); ++k) {
        gap = std::max({gap, std::abs(emp_I[k] - c.g_I[k]), std::abs(emp_C[k] - c.g_C[k])});
    }
    EXPECT_LE(gap, 0.01);
    EXPECT_LE(static_cast<double>(smp.ties) / 100000.0, smp.tie_bound * 3.0 + 1e-3);
}

TEST(DefaultClock, SamplerIsThreadInvariant) {
    DefaultSpec s;
    s.investor = party(0.4, 1.0, 1.0);
    s.counterparty = party(0.8, 2.0, 2.0);
    const TimeGrid g{0.0, 1.0, 50};
    const auto a = sample_default_times(s, g, 500, 3, 1);
    const auto b = sample_default_times(s, g, 500, 3, 4);
    EXPECT_EQ(a.tau_I, b.tau_I);
    EXPECT_EQ(a.tau_C, b.tau_C);
}

TEST(DefaultClock, RejectsNegativeIntensity) {
    DefaultSpec s;
    s.investor = party(-0.1, 1.0, 1.0);
    EXPECT_THROW(s.validate(), InvariantViolation);
}
