#include "xva/special.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "xva/errors.hpp"

namespace xva {

namespace {

constexpr double kEps = 1e-17;
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 100000;
// Above this shape Gamma(a) is handled in log space only.
constexpr double kLogSpaceShape = 30.0;

void check_arguments(double shape, double x) {
    if (!(shape > 0.0) || !std::isfinite(shape)) {
        throw DomainError("incomplete gamma: shape must be positive, got " + std::to_string(shape));
    }
    if (!(x >= 0.0)) {
        throw DomainError("incomplete gamma: argument must be non-negative, got " + std::to_string(x));
    }
}

// sum_{n>=0} x^n / (a (a+1) ... (a+n)); lower gamma = e^-x x^a * sum.
double lower_series(double a, double x) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int n = 0; n < kMaxIter; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) {
            return sum;
        }
    }
    throw NumericalError("incomplete gamma: series did not converge");
}

// Modified Lentz evaluation of the continued fraction for e^x x^-a Gamma(a, x).
double upper_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) <= 3.0e-16) {
            return h;
        }
    }
    throw NumericalError("incomplete gamma: continued fraction did not converge");
}

double log_prefactor(double a, double x) { return a * std::log(x) - x; }

// Regularized lower gamma P(a, x) on the series branch (x < a + 1).
double lower_regularized_series(double a, double x) {
    return std::exp(log_prefactor(a, x) - std::lgamma(a)) * lower_series(a, x);
}

} // namespace

void GammaParams::validate() const {
    if (!(shape > 0.0) || !std::isfinite(shape)) {
        throw DomainError("gamma threshold: shape must be positive");
    }
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw DomainError("gamma threshold: rate must be positive");
    }
}

double log_upper_incomplete_gamma(double shape, double x) {
    check_arguments(shape, x);
    if (x == 0.0) return std::lgamma(shape);
    if (shape == 1.0) return -x;
    if (x < shape + 1.0) {
        return std::lgamma(shape) + std::log1p(-lower_regularized_series(shape, x));
    }
    return log_prefactor(shape, x) + std::log(upper_fraction(shape, x));
}

double upper_incomplete_gamma(double shape, double x) {
    check_arguments(shape, x);
    if (shape > kLogSpaceShape) return std::exp(log_upper_incomplete_gamma(shape, x));
    if (x == 0.0) return std::tgamma(shape);
    if (shape == 1.0) return std::exp(-x);
    if (x < shape + 1.0) {
        const double lower = std::exp(log_prefactor(shape, x)) * lower_series(shape, x);
        return std::tgamma(shape) - lower;
    }
    return std::exp(log_prefactor(shape, x)) * upper_fraction(shape, x);
}

double regularized_upper_gamma(double shape, double x) {
    check_arguments(shape, x);
    if (x == 0.0) return 1.0;
    if (shape == 1.0) return std::exp(-x);
    if (x < shape + 1.0) return 1.0 - lower_regularized_series(shape, x);
    return std::exp(log_prefactor(shape, x) - std::lgamma(shape)) * upper_fraction(shape, x);
}

double gamma_survival(const GammaParams& params, double x) {
    params.validate();
    if (!(x >= 0.0)) throw DomainError("gamma_survival: x must be non-negative");
    if (std::isinf(x)) return 0.0;
    return regularized_upper_gamma(params.shape, params.rate * x);
}

double gamma_hazard_factor(const GammaParams& params, double cumulative_intensity) {
    params.validate();
    const double big_x = cumulative_intensity;
    if (!(big_x >= 0.0)) throw DomainError("gamma_hazard_factor: X must be non-negative");
    const double a = params.shape;
    const double beta = params.rate;
    if (a == 1.0) return beta;
    if (big_x == 0.0) {
        if (a < 1.0) {
            throw SingularInputError("gamma_hazard_factor: hazard diverges at X = 0 for shape < 1");
        }
        return 0.0;
    }
    const double y = beta * big_x;
    if (y >= a + 1.0) {
        // beta^a X^(a-1) e^-y / (e^-y y^a h) = 1 / (X h)
        return 1.0 / (big_x * upper_fraction(a, y));
    }
    const double log_num = a * std::log(beta) + (a - 1.0) * std::log(big_x) - y;
    return std::exp(log_num - log_upper_incomplete_gamma(a, y));
}

} // namespace xva
