#include <cmath>

#include <gtest/gtest.h>

#include "xva/errors.hpp"
#include "xva/time_function.hpp"

using namespace xva;

TEST(TimeFunction, ConstantIntegral) {
    const TimeFunction f(0.05);
    EXPECT_DOUBLE_EQ(f(3.0), 0.05);
    EXPECT_NEAR(f.integral(0.5, 2.0), 0.075, 1e-16);
    EXPECT_NEAR(f.integral(2.0, 0.5), -0.075, 1e-16);
}

TEST(TimeFunction, PiecewiseIsRightContinuous) {
    const auto f = TimeFunction::piecewise({1.0, 2.0}, {0.1, 0.2, 0.4});
    EXPECT_DOUBLE_EQ(f(0.99), 0.1);
    EXPECT_DOUBLE_EQ(f(1.0), 0.2);
    EXPECT_DOUBLE_EQ(f(2.5), 0.4);
    EXPECT_NEAR(f.integral(0.5, 2.5), 0.05 + 0.2 + 0.2, 1e-15);
    EXPECT_DOUBLE_EQ(f.sup(0.0, 3.0), 0.4);
    EXPECT_DOUBLE_EQ(f.inf(1.5, 3.0), 0.2);
}

TEST(TimeFunction, CallableIntegratedByQuadrature) {
    const auto f = TimeFunction::callable([](double t) { return std::sin(t) + 1.0; });
    EXPECT_NEAR(f.integral(0.0, 2.0), 1.0 - std::cos(2.0) + 2.0, 1e-12);
    EXPECT_NEAR(f.sup(0.0, 3.0), 2.0, 1e-5);
    EXPECT_NEAR(f.sup_abs(0.0, 1.0), 1.0 + std::sin(1.0), 1e-12);
}

TEST(TimeFunction, PlusShiftsEveryKind) {
    EXPECT_DOUBLE_EQ(TimeFunction(1.0).plus(0.5)(0.0), 1.5);
    EXPECT_DOUBLE_EQ(TimeFunction::piecewise({1.0}, {0.0, 1.0}).plus(0.5)(2.0), 1.5);
    EXPECT_DOUBLE_EQ(TimeFunction::callable([](double t) { return t; }).plus(0.5)(2.0), 2.5);
}

TEST(TimeFunction, RejectsMalformedPieces) {
    EXPECT_THROW(TimeFunction::piecewise({1.0}, {0.1}), DomainError);
    EXPECT_THROW(TimeFunction::piecewise({2.0, 1.0}, {0.1, 0.2, 0.3}), DomainError);
    EXPECT_THROW(TimeFunction(std::nan("")), DomainError);
}
