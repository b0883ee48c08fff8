#pragma once

namespace xva {

/// Gamma law of a default threshold: shape alpha > 0, rate beta > 0.
struct GammaParams {
    double shape = 1.0;
    double rate = 1.0;

    void validate() const;
};

/// Upper incomplete gamma function  Gamma(a, x) = int_x^inf y^(a-1) e^(-y) dy.
double upper_incomplete_gamma(double shape, double x);

/// Natural logarithm of upper_incomplete_gamma; finite wherever the
/// function itself would underflow or overflow.
double log_upper_incomplete_gamma(double shape, double x);

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
double regularized_upper_gamma(double shape, double x);

/// Survival function of a Gamma(shape, rate) threshold:
/// G(x) = Gamma(shape, rate * x) / Gamma(shape).
double gamma_survival(const GammaParams& params, double x);

/// Hazard per unit intensity of a gamma threshold,
///   -G'(X) / G(X) = rate^shape X^(shape-1) e^(-rate X) / Gamma(shape, rate X).
///
/// At X = 0 the factor is rate for shape == 1, zero for shape > 1 and
/// divergent for shape < 1 (SingularInputError).
double gamma_hazard_factor(const GammaParams& params, double cumulative_intensity);

} // namespace xva
