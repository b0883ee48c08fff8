#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "xva/errors.hpp"
#include "xva/simulate.hpp"
#include "xva/vol_model.hpp"

using namespace xva;

namespace {

VolModel heston(double b = 0.0) {
    PowerModel p;
    p.k = 0.08;
    p.l0 = 2.0;
    p.vols = {PowerTerm{0.3, 0.5}};
    p.correlation = -0.6;
    p.drift_b = b;
    return build_power_model(p);
}

} // namespace

TEST(Simulate, SeedsAreStableAndDistinct) {
    EXPECT_EQ(derive_seed(42, 7), derive_seed(42, 7));
    EXPECT_NE(derive_seed(42, 7), derive_seed(42, 8));
    EXPECT_NE(derive_seed(42, 7), derive_seed(43, 7));
    double a[4], b[4];
    fill_normals(1, 2, a, 4);
    fill_normals(1, 2, b, 4);
    for (int i = 0; i < 4; ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(Simulate, DeterministicAcrossThreadCounts) {
    const VolModel m = heston();
    const TimeGrid g{0.0, 1.0, 50};
    SimulateOptions one;
    one.threads = 1;
    SimulateOptions three;
    three.threads = 3;
    const PathSet a = simulate_paths(m, std::log(100.0), 0.04, g, 300, 9, one);
    const PathSet b = simulate_paths(m, std::log(100.0), 0.04, g, 300, 9, three);
    ASSERT_EQ(a.x.size(), b.x.size());
    for (std::size_t i = 0; i < a.x.size(); ++i) {
        ASSERT_EQ(a.x[i], b.x[i]);
        ASSERT_EQ(a.v[i], b.v[i]);
    }
}

TEST(Simulate, RecordStrideKeepsLastNode) {
    const PathSet p = simulate_paths(heston(), 0.0, 0.04, TimeGrid{0.0, 1.0, 10}, 5, 1, {0, 4, false, true});
    ASSERT_EQ(p.recorded_steps, (std::vector<int>{0, 4, 8, 10}));
    EXPECT_DOUBLE_EQ(p.time(3), 1.0);
}

TEST(Simulate, ExactPriceMatchesExponentialOfLogPath) {
    const VolModel m = heston(0.02);
    SimulateOptions o;
    o.keep_increments = true;
    const PathSet p = simulate_paths(m, std::log(100.0), 0.04, TimeGrid{0.0, 1.0, 100}, 100, 3, o);
    double worst = 0.0;
    for (std::size_t i = 0; i < p.n_paths; ++i) {
        const auto s = exact_price(p, i, m.drift_b, m.theta);
        for (std::size_t k = 0; k < s.size(); ++k) {
            worst = std::max(worst, std::abs(s[k] / std::exp(p.x_at(i, k)) - 1.0));
        }
    }
    EXPECT_LE(worst, 1e-12);
}

TEST(Simulate, PriceMeanGrowsAtDriftRate) {
    const VolModel m = heston(0.0);
    const double chi = 100.0;
    const TimeGrid g{0.0, 1.0, 50};
    const PathSet p = simulate_paths(m, std::log(chi), 0.04, g, 100000, 17, {0, 50, false, true});
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < p.n_paths; ++i) {
        const double s = std::exp(p.x_at(i, p.n_nodes() - 1));
        sum += s;
        sq += s * s;
    }
    const double n = static_cast<double>(p.n_paths);
    const double mean = sum / n;
    const double se = std::sqrt((sq / n - mean * mean) / (n - 1.0));
    EXPECT_LE(std::abs(mean - chi), 3.0 * se);
}

TEST(Simulate, HestonVarianceMeanFollowsOde) {
    const TimeGrid g{0.0, 1.0, 200};
    const double v0 = 0.09;
    PowerModel prm;
    prm.k = 0.08;
    prm.l0 = 2.0;
    prm.vols = {PowerTerm{0.3, 0.5}};
    const PathSet p = simulate_paths(build_power_model(prm), 0.0, v0, g, 40000, 5, {0, 200, false, true});
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < p.n_paths; ++i) {
        const double v = p.v_at(i, 1);
        sum += v;
        sq += v * v;
    }
    const double n = static_cast<double>(p.n_paths);
    const double mean = sum / n;
    const double se = std::sqrt((sq / n - mean * mean) / (n - 1.0));
    EXPECT_LE(std::abs(mean - oracle::mean_reverting_mean(v0, 0.08, 2.0, 1.0)), 3.0 * se);
}

TEST(Simulate, BlackScholesVarianceIsFrozen) {
    const PathSet p = simulate_paths(build_power_model(PowerModel{}), 0.0, 0.04, TimeGrid{0.0, 1.0, 20}, 50, 2);
    const PositivityStats s = positivity_report(p);
    EXPECT_EQ(s.min_v, 0.04);
    EXPECT_EQ(s.frac_nonpositive, 0.0);
}

TEST(Simulate, MomentBoundsHoldForHeston) {
    const VolModel m = heston(0.03);
    const PathSet p = simulate_paths(m, std::log(100.0), 0.04, TimeGrid{0.0, 1.0, 100}, 5000, 8, {0, 10, false, true});
    const MomentReport r = moment_report(p, m);
    EXPECT_TRUE(r.bounds_known);
    EXPECT_FALSE(r.v_bound_violated);
    EXPECT_FALSE(r.x_bound_violated);
    EXPECT_GT(r.x_bound, std::log(100.0));
}

TEST(Simulate, InvalidPathBudget) {
    VolModel m = heston();
    // coefficients blow up once the variance leaves a band: roughly half the paths
    m.zeta = [](double, double v) { return v > 0.06 ? std::numeric_limits<double>::infinity() : 0.0; };
    m.eta = [](double, double) { return 0.1; };
    const TimeGrid g{0.0, 1.0, 20};
    EXPECT_THROW(simulate_paths(m, 0.0, 0.04, g, 2000, 1), InvalidPathBudget);
    const PathSet p = simulate_paths(m, 0.0, 0.04, g, 2000, 1, {0, 1, false, false});
    EXPECT_GT(p.invalid_paths, 2u);
    EXPECT_LT(p.invalid_paths, 2000u);
}
