#pragma once

#include <functional>
#include <string>
#include <vector>

namespace xva {

/// Deterministic function of time. Either a constant, a right-continuous
/// piecewise constant (values[i] on [breaks[i-1], breaks[i])), or an
/// arbitrary callable integrated by adaptive quadrature.
class TimeFunction {
public:
    enum class Kind { constant, piecewise, callable };

    TimeFunction(double value = 0.0); // NOLINT: implicit from a number is intended

    static TimeFunction constant(double value);
    static TimeFunction piecewise(std::vector<double> breaks, std::vector<double> values);
    static TimeFunction callable(std::function<double(double)> fn, std::string label = "callable");

    double operator()(double t) const;

    /// int_a^b f(t) dt; negative when b < a.
    double integral(double a, double b) const;

    double sup(double a, double b) const;
    double inf(double a, double b) const;
    double sup_abs(double a, double b) const;

    Kind kind() const noexcept { return kind_; }
    bool is_constant() const noexcept { return kind_ == Kind::constant; }
    const std::vector<double>& breaks() const noexcept { return breaks_; }
    const std::vector<double>& values() const noexcept { return values_; }
    const std::string& label() const noexcept { return label_; }

    /// Same function shifted by a constant.
    TimeFunction plus(double shift) const;

private:
    Kind kind_ = Kind::constant;
    std::vector<double> breaks_;
    std::vector<double> values_{0.0};
    std::function<double(double)> fn_;
    std::string label_;

    // Sample points used for sup/inf of callables.
    static constexpr int kScanPoints = 2001;
};

/// Adaptive Gauss-Kronrod quadrature of fn over [a, b].
double integrate(const std::function<double(double)>& fn, double a, double b, double tol = 1e-12);

} // namespace xva
