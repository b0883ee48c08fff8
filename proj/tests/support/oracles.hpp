#pragma once

// Independent reference values for the test suites. Nothing here calls into
// the library under test.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace oracle {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Black-Scholes call.
inline double bs_call(double s, double k, double r, double sigma, double tau) {
    const double sd = sigma * std::sqrt(tau);
    const double d1 = (std::log(s / k) + (r + 0.5 * sigma * sigma) * tau) / sd;
    return s * normal_cdf(d1) - k * std::exp(-r * tau) * normal_cdf(d1 - sd);
}

/// e^{-r tau} E[(S_T - level)+] by quadrature of the lognormal density.
inline double lognormal_call_quadrature(double s, double level, double r, double sigma, double tau) {
    const double mu = std::log(s) + (r - 0.5 * sigma * sigma) * tau;
    const double sd = sigma * std::sqrt(tau);
    auto integrand = [&](double z) {
        if (z > 40.0) return 0.0; // density below 1e-340
        const double st = std::exp(mu + sd * z);
        return st > level ? (st - level) * std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI) : 0.0;
    };
    const double z0 = (std::log(level) - mu) / sd;
    boost::math::quadrature::exp_sinh<double> tail;
    const double value = tail.integrate([&](double u) { return integrand(z0 + u); });
    return std::exp(-r * tau) * value;
}

/// min((S - K)+, cap): closed-form call minus the quadrature cap correction.
inline double capped_call(double s, double k, double cap, double r, double sigma, double tau) {
    return bs_call(s, k, r, sigma, tau) - lognormal_call_quadrature(s, k + cap, r, sigma, tau);
}

/// P(Gamma(shape, rate) > x) by quadrature of the density.
inline double gamma_tail_quadrature(double shape, double rate, double x) {
    const double log_norm = shape * std::log(rate) - std::lgamma(shape);
    auto density = [&](double y) {
        if (y <= 0.0) return 0.0;
        return std::exp(log_norm + (shape - 1.0) * std::log(y) - rate * y);
    };
    boost::math::quadrature::exp_sinh<double> tail(12);
    double err = 0.0;
    return tail.integrate([&](double u) { return density(x + u); }, 1e-14, &err);
}

/// E[V_t] for dV = (k - l0 V) dt + ... with constant coefficients.
inline double mean_reverting_mean(double v0, double k, double l0, double t) {
    return k / l0 + (v0 - k / l0) * std::exp(-l0 * t);
}

/// Kolmogorov-Smirnov distance of a sample against the normal law N(mu, sd^2).
inline double ks_normal(std::vector<double> xs, double mu, double sd) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = normal_cdf((xs[i] - mu) / sd);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return d;
}

struct Rates {
    double pi = 0.0;
    double r = 0.0, c_plus = 0.0, c_minus = 0.0, f_plus = 0.0, f_minus = 0.0, h_plus = 0.0, h_minus = 0.0;
    double alpha = 1.0, beta = 1.0;
    double lgd_I = 0.0, lgd_C = 0.0;
    bool bank = false;
    double g_I = 0.0, g_C = 0.0; // G'/G <= 0
};

/// Driver assembled from its three cash-flow components: the no-default part,
/// the investor-default part and the counterparty-default part.
inline double driver_by_parts(const Rates& q, double y, double hedge) {
    const double yp = std::max(y, 0.0);
    const double ym = std::max(-y, 0.0);
    const double hp = std::max(hedge, 0.0);
    const double hm = std::max(-hedge, 0.0);
    // collateral account C = alpha y, funding account F = (1 - alpha) y
    const double coll = q.alpha * y;
    const double fund = (1.0 - q.alpha) * y;
    const double coll_rate = coll > 0 ? q.c_plus : q.c_minus;
    const double fund_rate = fund > 0 ? q.f_plus : q.f_minus;
    const double repo = -(q.r - q.h_plus) * hp + (q.r - q.h_minus) * hm;
    const double b0 = q.pi - coll_rate * coll - fund_rate * fund + repo;
    const double close_out_I = (1.0 - q.beta) * y - (q.bank ? q.lgd_I * ((q.beta - q.alpha) * ym + (1.0 - q.alpha) * yp) : 0.0);
    const double close_out_C = (1.0 - q.beta) * y + q.lgd_C * (q.beta - q.alpha) * yp;
    return b0 + q.g_I * close_out_I + q.g_C * close_out_C;
}

} // namespace oracle
