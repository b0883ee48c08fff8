#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "xva/errors.hpp"
#include "xva/special.hpp"

using namespace xva;

TEST(Special, ExponentialThresholdIsExact) {
    for (double rate : {0.25, 1.0, 3.0}) {
        for (double x : {0.0, 0.1, 1.0, 7.5, 40.0}) {
            const double g = gamma_survival({1.0, rate}, x);
            EXPECT_NEAR(g, std::exp(-rate * x), 1e-14 * std::exp(-rate * x)) << rate << " " << x;
        }
    }
}

TEST(Special, SurvivalMatchesDensityQuadrature) {
    for (double shape : {0.4, 1.0, 2.0, 5.5}) {
        for (double rate : {0.5, 2.0}) {
            for (double x : {0.05, 1.0, 4.0}) {
                const double ref = oracle::gamma_tail_quadrature(shape, rate, x);
                EXPECT_NEAR(gamma_survival({shape, rate}, x), ref, 1e-10 * ref) << shape << " " << rate << " " << x;
            }
        }
    }
}

TEST(Special, IncompleteGammaKnownValues) {
    // Gamma(2, x) = (1 + x) e^-x, Gamma(1/2, x) = sqrt(pi) erfc(sqrt x)
    EXPECT_NEAR(upper_incomplete_gamma(2.0, 1.5), 2.5 * std::exp(-1.5), 1e-15);
    EXPECT_NEAR(upper_incomplete_gamma(0.5, 0.7), std::sqrt(M_PI) * std::erfc(std::sqrt(0.7)), 1e-14);
    EXPECT_NEAR(regularized_upper_gamma(3.0, 0.0), 1.0, 0.0);
    EXPECT_NEAR(log_upper_incomplete_gamma(2.0, 800.0), std::log(801.0) - 800.0, 1e-12);
}

TEST(Special, HazardFactor) {
    // shape 1: constant rate
    EXPECT_DOUBLE_EQ(gamma_hazard_factor({1.0, 2.0}, 0.0), 2.0);
    EXPECT_NEAR(gamma_hazard_factor({1.0, 2.0}, 3.0), 2.0, 1e-13);
    // shape 2, rate 1 at X = 1: e^-1 / Gamma(2, 1) = 1 / 2
    EXPECT_NEAR(gamma_hazard_factor({2.0, 1.0}, 1.0), 0.5, 1e-14);
    EXPECT_DOUBLE_EQ(gamma_hazard_factor({2.0, 1.0}, 0.0), 0.0);
    EXPECT_THROW(gamma_hazard_factor({0.5, 1.0}, 0.0), SingularInputError);
}

TEST(Special, HazardIsMinusLogSurvivalSlope) {
    const GammaParams p{3.2, 0.8};
    for (double x : {0.3, 2.0, 9.0}) {
        const double h = 1e-5;
        const double fd = -(std::log(gamma_survival(p, x + h)) - std::log(gamma_survival(p, x - h))) / (2 * h);
        EXPECT_NEAR(gamma_hazard_factor(p, x), fd, 1e-7 * fd);
    }
}

TEST(Special, RejectsBadParameters) {
    EXPECT_THROW(GammaParams({0.0, 1.0}).validate(), DomainError);
    EXPECT_THROW(GammaParams({1.0, -1.0}).validate(), DomainError);
    EXPECT_THROW(gamma_survival({1.0, 1.0}, -0.5), DomainError);
}
