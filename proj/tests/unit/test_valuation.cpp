#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "xva/errors.hpp"
#include "xva/valuation.hpp"
#include "xva/vol_model.hpp"

using namespace xva;

namespace {

MarketSpec zero_xva(double r) {
    MarketSpec m;
    m.r_hat = r;
    m.c_plus = m.c_minus = m.f_plus = m.f_minus = m.h_plus = m.h_minus = r;
    m.payoff.kind = Payoff::Kind::constant;
    m.payoff.value = 1.0;
    return m;
}

struct Drawn {
    MarketSpec spec;
    oracle::Rates rates;
};

Drawn random_spec(std::mt19937_64& gen, double t) {
    std::uniform_real_distribution<double> rate(-0.01, 0.08), unit(0.0, 1.0), lam(0.0, 0.3);
    Drawn d;
    MarketSpec& m = d.spec;
    oracle::Rates& q = d.rates;
    q.r = rate(gen);
    q.c_plus = rate(gen);
    q.c_minus = rate(gen);
    q.f_plus = rate(gen);
    q.f_minus = rate(gen);
    q.h_plus = rate(gen);
    q.h_minus = rate(gen);
    const double a = unit(gen), b = unit(gen);
    q.alpha = std::min(a, b);
    q.beta = std::max(a, b);
    q.lgd_I = unit(gen);
    q.lgd_C = unit(gen);
    q.bank = unit(gen) < 0.5;
    q.pi = rate(gen);
    m.r_hat = q.r;
    m.c_plus = q.c_plus;
    m.c_minus = q.c_minus;
    m.f_plus = q.f_plus;
    m.f_minus = q.f_minus;
    m.h_plus = q.h_plus;
    m.h_minus = q.h_minus;
    m.alpha_frac = q.alpha;
    m.beta_frac = q.beta;
    m.lgd_I = q.lgd_I;
    m.lgd_C = q.lgd_C;
    m.investor_is_bank = q.bank;
    m.dividend.level = q.pi;
    m.defaults.investor.intensity = lam(gen);
    m.defaults.investor.threshold = {1.0 + unit(gen), 0.5 + unit(gen)};
    m.defaults.counterparty.intensity = lam(gen);
    m.defaults.counterparty.threshold = {1.0, 0.5 + unit(gen)};
    q.g_I = -m.defaults.investor.hazard(t);
    q.g_C = -m.defaults.counterparty.hazard(t);
    m.payoff.kind = Payoff::Kind::constant;
    m.payoff.value = 1.0;
    return d;
}

} // namespace

TEST(Valuation, DiscountFactors) {
    EXPECT_EQ(discount(0.0, 0.0, 1.0), 1.0);
    EXPECT_NEAR(discount(0.05, 0.0, 1.0), std::exp(-0.05), 1e-15);
    EXPECT_EQ(discount(0.05, 1.0, 0.5), 1.0);
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    const auto r = TimeFunction::callable([](double t) { return 0.03 + 0.02 * std::sin(3 * t); });
    for (int i = 0; i < 20; ++i) {
        double a = u(gen), b = u(gen), c = u(gen);
        if (a > b) std::swap(a, b);
        if (b > c) std::swap(b, c);
        if (a > b) std::swap(a, b);
        EXPECT_NEAR(discount(r, a, b) * discount(r, b, c), discount(r, a, c), 1e-12);
    }
}

TEST(Valuation, DriverMatchesComponentAssembly) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> y(-5.0, 5.0), delta(-1.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double t = 0.37;
        Drawn d = random_spec(gen, t);
        const double dl = delta(gen);
        d.spec.hedge.kind = Hedge::Kind::proportional;
        d.spec.hedge.delta = dl;
        const double yy = y(gen);
        const double ref = oracle::driver_by_parts(d.rates, yy, dl * yy);
        EXPECT_NEAR(driver(d.spec, t, 100.0, 0.04, yy), ref, 1e-13) << i;
        const RateSnapshot rs = snapshot(d.spec, t);
        EXPECT_NEAR(driver_at(d.spec, rs, 100.0, 0.04, yy), ref, 1e-13) << i;
    }
}

TEST(Valuation, ZeroXvaIsDiscounting) {
    const MarketSpec m = zero_xva(0.05);
    for (double y : {-3.0, 0.0, 2.5}) EXPECT_NEAR(driver(m, 0.5, 90.0, 0.04, y), -0.05 * y, 1e-16);
    const auto affine = affine_form(m);
    ASSERT_TRUE(affine.has_value());
    EXPECT_NEAR(affine->m(0.3), -0.05, 1e-16);
    EXPECT_NEAR(affine->a(0.3), 0.0, 0.0);
    EXPECT_NEAR(driver_lipschitz(m, 0.2), 0.05, 1e-16);
}

TEST(Valuation, PiecewiseLinearSlopesMatchFiniteDifferences) {
    std::mt19937_64 gen(5);
    for (int i = 0; i < 20; ++i) {
        Drawn d = random_spec(gen, 0.6);
        const RateSnapshot rs = snapshot(d.spec, 0.6);
        const double h = 1e-3;
        const double right = (driver(d.spec, 0.6, 1.0, 0.1, 2 * h) - driver(d.spec, 0.6, 1.0, 0.1, h)) / h;
        const double left = (driver(d.spec, 0.6, 1.0, 0.1, -h) - driver(d.spec, 0.6, 1.0, 0.1, -2 * h)) / h;
        EXPECT_NEAR(right, rs.slope_pos, 1e-9);
        EXPECT_NEAR(left, -rs.slope_neg, 1e-9);
    }
}

TEST(Valuation, DriverMonotonicity) {
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> y(0.01, 5.0);
    for (int i = 0; i < 50; ++i) {
        Drawn d = random_spec(gen, 0.4);
        MarketSpec hi = d.spec;
        hi.dividend.level = d.spec.dividend.level.plus(0.01);
        const double yy = y(gen);
        EXPECT_GT(driver(hi, 0.4, 1.0, 0.1, yy), driver(d.spec, 0.4, 1.0, 0.1, yy));
        EXPECT_GT(driver(hi, 0.4, 1.0, 0.1, -yy), driver(d.spec, 0.4, 1.0, 0.1, -yy));
        MarketSpec c_hi = d.spec;
        c_hi.c_plus = d.spec.c_plus.plus(0.01);
        if (d.rates.alpha > 0.0) EXPECT_LT(driver(c_hi, 0.4, 1.0, 0.1, yy), driver(d.spec, 0.4, 1.0, 0.1, yy));
    }
}

TEST(Valuation, DriverDomain) {
    const MarketSpec m = zero_xva(0.05);
    EXPECT_EQ(driver(m, 0.5, 100.0, 0.04, 0.0), 0.0);
    EXPECT_THROW(driver(m, 0.5, 100.0, 0.0, 1.0), DomainError);
    EXPECT_THROW(driver(m, 0.5, -1.0, 0.04, 1.0), DomainError);
}

TEST(Valuation, AProcessIncrement) {
    const MarketSpec m = zero_xva(0.05);
    EXPECT_NEAR(a_process_increment(m, 0.3, 100.0, 0.04, 2.0), driver(m, 0.3, 100.0, 0.04, 2.0) + 0.05 * 2.0, 1e-16);

    std::mt19937_64 gen(8);
    for (int i = 0; i < 20; ++i) {
        Drawn d = random_spec(gen, 0.7);
        const double y = 1.5 - 0.2 * i;
        const double g = d.spec.defaults.joint_survival(0.7);
        const double ref = g * (oracle::driver_by_parts(d.rates, y, 0.0) + (d.rates.r - d.rates.g_I - d.rates.g_C) * y);
        EXPECT_NEAR(a_process_increment(d.spec, 0.7, 100.0, 0.04, y), ref, 1e-10);
    }
}

TEST(Valuation, SlabBoundariesRespectBudget) {
    MarketSpec m = zero_xva(0.9);
    m.horizon = 2.0;
    m.defaults.horizon = 2.0;
    const auto b = slab_boundaries(m, 0.0, 2.0, 0.5, 1);
    ASSERT_EQ(b.size(), 5u); // 1.8 / 0.5 -> 4 slabs
    EXPECT_DOUBLE_EQ(b.front(), 0.0);
    EXPECT_DOUBLE_EQ(b.back(), 2.0);
    for (std::size_t i = 1; i < b.size(); ++i) EXPECT_LE(0.9 * (b[i] - b[i - 1]), 0.5 + 1e-9);
    EXPECT_EQ(slab_boundaries(m, 0.0, 2.0, 10.0, 3).size(), 4u);
}

TEST(Valuation, BoundaryCondition) {
    MarketSpec m = zero_xva(0.05);
    m.payoff.kind = Payoff::Kind::put;
    m.payoff.strike = 100.0;
    const BoundaryReport ok = check_boundary(m, 0.0, 100.0, {50.0, 100.0, 150.0}, {0.02, 0.06});
    EXPECT_TRUE(ok.holds);
    EXPECT_TRUE(ok.nonnegativity);
    m.dividend.level = 10.0; // pushes B(., sup J) above zero
    EXPECT_FALSE(check_boundary(m, 0.0, 100.0, {100.0}, {0.04}).holds);
    m.dividend.level = -0.1;
    const BoundaryReport neg = check_boundary(m, 0.0, 100.0, {100.0}, {0.04});
    EXPECT_FALSE(neg.holds);
    EXPECT_FALSE(neg.nonnegativity);
}

TEST(Valuation, MarketInvariants) {
    MarketSpec m = zero_xva(0.05);
    m.alpha_frac = 0.8;
    m.beta_frac = 0.5;
    try {
        m.validate();
        ADD_FAILURE();
    } catch (const InvariantViolation& e) {
        EXPECT_EQ(e.condition(), "fraction_order");
    }
    m = zero_xva(0.05);
    m.lgd_C = 1.5;
    EXPECT_THROW(m.validate(), InvariantViolation);
    m = zero_xva(0.05);
    m.payoff.kind = Payoff::Kind::capped_call;
    m.payoff.strike = 100.0;
    m.payoff.cap = 0.0;
    EXPECT_THROW(m.validate(), InvariantViolation);
}

TEST(Valuation, PayoffShapes) {
    Payoff p;
    p.kind = Payoff::Kind::capped_call;
    p.strike = 100.0;
    p.cap = 10.0;
    EXPECT_EQ(p(95.0, 0.04), 0.0);
    EXPECT_EQ(p(105.0, 0.04), 5.0);
    EXPECT_EQ(p(150.0, 0.04), 10.0);
    EXPECT_EQ(p.sup(), 10.0);
    p.kind = Payoff::Kind::put;
    p.offset = 1.0;
    EXPECT_EQ(p(60.0, 0.04), 41.0);
    EXPECT_EQ(p.sup(), 101.0);
}

namespace {

GridFunction bond_grid(double r, double T) {
    GridFunction u(Axis::uniform(0.0, T, 11), Axis::uniform(3.0, 6.2, 9), Axis::uniform(0.001, 0.3, 5));
    for (std::size_t it = 0; it < u.nt(); ++it)
        for (std::size_t ix = 0; ix < u.nx(); ++ix)
            for (std::size_t iv = 0; iv < u.nv(); ++iv) u.at(it, ix, iv) = std::exp(-r * (T - u.t()[it]));
    return u;
}

VolModel heston_q(double r) {
    PowerModel p;
    p.k = 0.08;
    p.l0 = 2.0;
    p.vols = {PowerTerm{0.3, 0.5}};
    p.correlation = -0.5;
    return measure_change(build_power_model(p), r, 0.0);
}

} // namespace

TEST(Valuation, ResidualOfBondSolutionIsZero) {
    const MarketSpec m = zero_xva(0.05);
    const ResidualReport r =
        martingale_residual(m, heston_q(0.05), bond_grid(0.05, 1.0), 0.0, std::log(100.0), 0.04,
                            {0.0, 0.25, 0.5, 0.75, 1.0}, 5000, 3);
    ASSERT_EQ(r.mean.size(), 4u);
    for (std::size_t j = 0; j < r.mean.size(); ++j) EXPECT_LE(std::abs(r.mean[j]), 3.0 * r.stderr_[j] + 1e-5); // linear-in-time interpolation of u
}

TEST(Valuation, ResidualRejectsConstantCandidate) {
    MarketSpec m = zero_xva(0.05);
    m.payoff.kind = Payoff::Kind::put;
    m.payoff.strike = 100.0;
    GridFunction u = bond_grid(0.05, 1.0);
    std::fill(u.values().begin(), u.values().end(), 5.0);
    const ResidualReport r = martingale_residual(m, heston_q(0.05), u, 0.0, std::log(100.0), 0.04,
                                                 {0.0, 0.5, 1.0}, 5000, 3);
    EXPECT_GT(r.max_abs_z, 3.0);
}

TEST(Valuation, ResidualExactlyZeroInZeroMarket) {
    const MarketSpec m = zero_xva(0.0);
    GridFunction u = bond_grid(0.0, 1.0);
    const ResidualReport r = martingale_residual(m, heston_q(0.0), u, 0.0, std::log(100.0), 0.04,
                                                 {0.0, 0.5, 1.0}, 200, 3);
    for (double v : r.mean) EXPECT_EQ(v, 0.0);
}
