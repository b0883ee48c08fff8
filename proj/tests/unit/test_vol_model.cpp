#include <cmath>

#include <gtest/gtest.h>

#include "xva/errors.hpp"
#include "xva/vol_model.hpp"

using namespace xva;

namespace {

PowerModel heston(double k, double l0, double lambda) {
    PowerModel p;
    p.k = k;
    p.l0 = l0;
    p.vols = {PowerTerm{lambda, 0.5}};
    p.correlation = -0.5;
    p.drift_b = 0.03;
    return p;
}

} // namespace

TEST(VolModel, BlackScholesDegenerate) {
    PowerModel p;
    const VolModel m = build_power_model(p);
    for (double v : {0.01, 0.04, 0.3}) {
        EXPECT_EQ(m.zeta(0.5, v), 0.0);
        EXPECT_EQ(m.eta(0.5, v), 0.0);
        EXPECT_DOUBLE_EQ(m.theta(0.5, v), std::sqrt(v));
    }
    EXPECT_TRUE(check_positivity(p).holds);
}

TEST(VolModel, HestonCoefficients) {
    const VolModel m = build_power_model(heston(0.08, 2.0, 0.3));
    EXPECT_DOUBLE_EQ(m.zeta(0.0, 0.05), 0.08 - 0.1);
    EXPECT_DOUBLE_EQ(m.eta(0.0, 0.04), 0.3 * 0.2);
    // flat drift below zero, eta on |v|
    EXPECT_DOUBLE_EQ(m.zeta(0.0, -0.01), 0.08);
    EXPECT_DOUBLE_EQ(m.eta(0.0, -0.04), 0.3 * 0.2);
}

TEST(VolModel, GarchAndPowerTerms) {
    PowerModel p;
    p.k = 0.1;
    p.l0 = 1.0;
    p.drifts = {PowerDrift{-0.5, 2.0}};
    p.vols = {PowerTerm{0.2, 1.0}, PowerTerm{0.1, 1.5}};
    const VolModel m = build_power_model(p);
    const double v = 0.3;
    EXPECT_NEAR(m.zeta(0.0, v), 0.1 - v - 0.5 * v * v, 1e-15);
    EXPECT_NEAR(m.eta(0.0, v), 0.2 * v + 0.1 * std::pow(v, 1.5), 1e-15);
    EXPECT_TRUE(check_positivity(p).holds); // gamma* = 1
}

TEST(VolModel, FellerTypeCondition) {
    // lambda^2 / 2 <= k
    EXPECT_TRUE(check_positivity(heston(0.045, 2.0, 0.3)).holds);
    const PositivityReport bad = check_positivity(heston(0.044, 2.0, 0.3));
    EXPECT_FALSE(bad.holds);
    EXPECT_DOUBLE_EQ(bad.gamma_star, 0.5);
    EXPECT_NEAR(bad.lambda_sum, 0.3, 1e-15);
    EXPECT_THROW(build_power_model(heston(0.044, 2.0, 0.3)), InvariantViolation);
    EXPECT_NO_THROW(build_power_model(heston(0.044, 2.0, 0.3), false));
}

TEST(VolModel, IntermediateExponentScansDelta) {
    PowerModel p = heston(0.5, 1.0, 0.1);
    p.vols[0].beta = 0.75;
    const PositivityReport r = check_positivity(p);
    EXPECT_TRUE(r.holds);
    EXPECT_LE(r.lambda_sum * r.lambda_sum * r.delta, r.k_inf);
    p.k = 0.0;
    EXPECT_FALSE(check_positivity(p).holds);
}

TEST(VolModel, StructuralConditionsNamed) {
    auto expect_condition = [](const PowerModel& p, const std::string& name) {
        try {
            p.validate(false);
            ADD_FAILURE() << "expected " << name;
        } catch (const InvariantViolation& e) {
            EXPECT_EQ(e.condition(), name);
        }
    };
    PowerModel p = heston(0.08, 2.0, 0.3);
    p.k = -0.1;
    expect_condition(p, "k_nonnegative");
    p = heston(0.08, 2.0, 0.3);
    p.vols[0].beta = 0.4;
    expect_condition(p, "beta_range");
    p = heston(0.08, 2.0, 0.3);
    p.drifts = {PowerDrift{0.1, 2.0}};
    expect_condition(p, "l_nonpositive");
    p = heston(0.08, 2.0, 0.3);
    p.drifts = {PowerDrift{-0.1, 0.5}};
    expect_condition(p, "alpha_range");
    p = heston(0.08, 2.0, 0.3);
    p.correlation = 1.0;
    expect_condition(p, "correlation");
}

TEST(VolModel, MeasureChange) {
    const VolModel m = build_power_model(heston(0.08, 2.0, 0.3));
    const VolModel q0 = measure_change(m, 0.05, 0.0);
    EXPECT_DOUBLE_EQ(q0.drift_b(0.3), 0.05);
    EXPECT_DOUBLE_EQ(q0.zeta(0.1, 0.04), m.zeta(0.1, 0.04));

    const double gamma = 0.4;
    const VolModel q = measure_change(m, 0.05, gamma);
    const double v = 0.04;
    EXPECT_NEAR(q.zeta(0.0, v), 0.08 - 2.0 * v - gamma * 0.3 * std::sqrt(v) * std::sqrt(v), 1e-15);
    EXPECT_NEAR(q.zeta(0.0, -0.01), 0.08, 1e-15);

    PowerModel shifted = heston(0.08, 2.0, 0.3);
    shifted.theta0 = 0.1;
    EXPECT_THROW(measure_change(build_power_model(shifted), 0.05, gamma), ConditionError);
}
