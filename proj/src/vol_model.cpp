#include "xva/vol_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "xva/errors.hpp"

namespace xva {

namespace {

double power(double x, double e) {
    if (e == 0.5) return std::sqrt(x);
    if (e == 1.0) return x;
    if (e == 2.0) return x * x;
    return std::pow(x, e);
}

void check_correlation(const TimeFunction& rho, double horizon) {
    if (!(rho.sup_abs(0.0, horizon) < 1.0)) {
        throw InvariantViolation("correlation", "|rho(t)| must stay below 1 on [0, T]");
    }
    if (rho.kind() == TimeFunction::Kind::callable) {
        const double integral =
            integrate([&rho](double t) { return 1.0 / (1.0 - rho(t) * rho(t)); }, 0.0, horizon, 1e-8);
        if (!std::isfinite(integral)) {
            throw InvariantViolation("correlation", "int (1 - rho^2)^-1 dt is not finite");
        }
    }
}

} // namespace

void VolModel::validate(double horizon) const {
    if (!theta || !zeta || !eta) throw InvariantViolation("coefficients", "missing coefficient function");
    if (!(horizon > 0.0)) throw DomainError("model horizon must be positive");
    check_correlation(correlation, horizon);
}

void PowerModel::validate(bool require_positivity) const {
    if (!(horizon > 0.0)) throw DomainError("power model: horizon must be positive");
    if (k.inf(0.0, horizon) < 0.0) throw InvariantViolation("k_nonnegative", "k(t) must be >= 0");
    for (const auto& d : drifts) {
        if (d.l.sup(0.0, horizon) > 0.0) {
            throw InvariantViolation("l_nonpositive", "every l_i(t) must be <= 0");
        }
        if (!(d.alpha >= 1.0) || !std::isfinite(d.alpha)) {
            throw InvariantViolation("alpha_range", "every alpha_i must lie in [1, inf)");
        }
    }
    for (const auto& term : vols) {
        if (!(term.beta >= 0.5) || !std::isfinite(term.beta)) {
            throw InvariantViolation("beta_range", "every beta_i must lie in [1/2, inf)");
        }
    }
    check_correlation(correlation, horizon);
    if (require_positivity) {
        const PositivityReport report = check_positivity(*this);
        if (!report.holds) throw InvariantViolation("feller", report.inequality + " fails");
    }
}

PositivityReport check_positivity(const PowerModel& params) {
    PositivityReport report;
    report.witness = "feller";
    report.gamma_star = std::numeric_limits<double>::infinity();
    for (const auto& term : params.vols) {
        const double sup = term.lambda.sup_abs(0.0, params.horizon);
        if (sup == 0.0) continue;
        report.lambda_sum += sup;
        report.gamma_star = std::min(report.gamma_star, term.beta);
    }
    report.k_inf = params.k.inf(0.0, params.horizon);
    const double lhs = report.lambda_sum * report.lambda_sum;

    std::ostringstream text;
    if (report.gamma_star >= 1.0) {
        report.holds = true;
        text << "gamma* = " << report.gamma_star << " >= 1, no condition on k";
    } else if (report.gamma_star == 0.5) {
        report.delta = 0.5;
        report.holds = lhs * 0.5 <= report.k_inf;
        text << "(sum sup|lambda|)^2 / 2 = " << lhs * 0.5 << " <= inf k = " << report.k_inf;
    } else {
        // Scan delta = 10^j from the largest so the report names the strongest bound met.
        report.holds = false;
        for (int j = 3; j >= -3; --j) {
            const double delta = std::pow(10.0, j);
            if (lhs * delta <= report.k_inf) {
                report.holds = true;
                report.delta = delta;
                break;
            }
        }
        if (!report.holds) report.delta = 1e-3;
        text << "(sum sup|lambda|)^2 * " << report.delta << " = " << lhs * report.delta
             << " <= inf k = " << report.k_inf;
    }
    report.inequality = text.str();
    return report;
}

VolModel build_power_model(const PowerModel& params, bool require_positivity) {
    params.validate(require_positivity);

    VolModel model;
    model.name = "power";
    model.drift_b = params.drift_b;
    model.correlation = params.correlation;

    const TimeFunction k = params.k;
    const TimeFunction l0 = params.l0;
    const auto drifts = params.drifts;
    model.zeta = [k, l0, drifts](double t, double v) {
        const double vp = v > 0.0 ? v : 0.0;
        double out = k(t) - l0(t) * vp;
        for (const auto& d : drifts) out += d.l(t) * power(vp, d.alpha);
        return out;
    };

    const auto vols = params.vols;
    model.eta = [vols](double t, double v) {
        const double av = std::abs(v);
        double out = 0.0;
        for (const auto& term : vols) out += term.lambda(t) * power(av, term.beta);
        return out;
    };

    const TimeFunction theta0 = params.theta0;
    const TimeFunction theta1 = params.theta1;
    model.theta = [theta0, theta1](double t, double v) { return theta0(t) + theta1(t) * std::sqrt(std::abs(v)); };

    const double h = params.horizon;
    model.flags.theta_continuous = true;
    model.flags.theta_zero_at_zero = theta0.sup_abs(0.0, h) == 0.0;
    model.flags.theta_nonneg = theta0.inf(0.0, h) >= 0.0 && theta1.inf(0.0, h) >= 0.0;
    model.flags.eta_zero_at_zero = true;
    model.flags.eta_nonneg_increasing =
        std::all_of(vols.begin(), vols.end(), [h](const PowerTerm& p) { return p.lambda.inf(0.0, h) >= 0.0; });

    model.growth.known = true;
    model.growth.k_zeta = std::max(0.0, k.sup(0.0, h));
    model.growth.l_zeta = -l0.inf(0.0, h);
    model.growth.k_theta = theta0.sup_abs(0.0, h);
    model.growth.lambda_theta = theta1.sup_abs(0.0, h);
    return model;
}

VolModel measure_change(const VolModel& model, const TimeFunction& r_hat, double gamma) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw DomainError("measure change: gamma must be >= 0");
    VolModel out = model;
    out.drift_b = r_hat;
    if (gamma == 0.0) return out;
    if (!model.flags.theta_continuous || !model.flags.theta_zero_at_zero) {
        throw ConditionError("measure change with gamma > 0 needs theta continuous and theta(., 0) = 0");
    }
    const TvFunction zeta = model.zeta;
    const TvFunction eta = model.eta;
    const TvFunction theta = model.theta;
    out.zeta = [zeta, eta, theta, gamma](double t, double v) {
        const double vp = v > 0.0 ? v : 0.0;
        return zeta(t, v) - gamma * eta(t, vp) * theta(t, vp);
    };
    // The adjustment only lowers zeta when eta and theta are non-negative.
    if (!(model.flags.eta_nonneg_increasing && model.flags.theta_nonneg)) out.growth.known = false;
    return out;
}

} // namespace xva
