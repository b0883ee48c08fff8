#include "xva/valuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "xva/errors.hpp"
#include "xva/parallel.hpp"

namespace xva {

namespace {

double pos(double y) { return y > 0.0 ? y : 0.0; }
double neg(double y) { return y < 0.0 ? -y : 0.0; }

void check_rate(const TimeFunction& f, const char* name, double horizon) {
    const double s = f.sup(0.0, horizon);
    const double i = f.inf(0.0, horizon);
    if (!std::isfinite(s) || !std::isfinite(i)) throw InvariantViolation(name, "rate must be finite");
}

// Sample times on [0, T] including every break of the given functions.
std::vector<double> sample_times(double horizon, std::initializer_list<const TimeFunction*> fns, int n = 1001) {
    std::vector<double> t;
    for (int i = 0; i < n; ++i) t.push_back(horizon * i / (n - 1));
    for (const TimeFunction* f : fns) {
        for (double b : f->breaks()) {
            if (b >= 0.0 && b <= horizon) t.push_back(b);
        }
    }
    std::sort(t.begin(), t.end());
    return t;
}

} // namespace

double Payoff::operator()(double s, double v) const {
    switch (kind) {
    case Kind::constant:
        return value + offset;
    case Kind::capped_call:
        return std::min(pos(s - strike), cap) + offset;
    case Kind::put:
        return pos(strike - s) + offset;
    case Kind::callable:
        return fn(s, v) + offset;
    }
    return offset;
}

double Payoff::sup() const {
    switch (kind) {
    case Kind::constant:
        return value + offset;
    case Kind::capped_call:
        return cap + offset;
    case Kind::put:
        return strike + offset;
    case Kind::callable:
        return declared_sup + offset;
    }
    return offset;
}

void Payoff::validate() const {
    if (!std::isfinite(offset) || offset < 0.0) throw InvariantViolation("payoff_nonnegative", "offset must be >= 0");
    switch (kind) {
    case Kind::constant:
        if (!(value >= 0.0) || !std::isfinite(value)) {
            throw InvariantViolation("payoff_nonnegative", "constant payoff must be finite and >= 0");
        }
        break;
    case Kind::capped_call:
        if (!(strike > 0.0) || !std::isfinite(strike)) throw InvariantViolation("payoff_strike", "strike must be > 0");
        if (!(cap > 0.0) || !std::isfinite(cap)) throw InvariantViolation("payoff_bounded", "cap must be finite and > 0");
        break;
    case Kind::put:
        if (!(strike > 0.0) || !std::isfinite(strike)) throw InvariantViolation("payoff_strike", "strike must be > 0");
        break;
    case Kind::callable:
        if (!fn) throw InvariantViolation("payoff_callable", "missing payoff function");
        if (!std::isfinite(declared_sup)) throw InvariantViolation("payoff_bounded", "declared sup must be finite");
        break;
    }
}

double Hedge::operator()(double t, double s, double v, double y) const {
    switch (kind) {
    case Kind::none:
        return 0.0;
    case Kind::proportional:
        return delta(t) * y;
    case Kind::callable:
        return fn(t, s, v, y);
    }
    return 0.0;
}

double Dividend::operator()(double t, double s, double v) const {
    return kind == Kind::constant ? level(t) : fn(t, s, v);
}

void MarketSpec::validate() const {
    if (!(horizon > 0.0)) throw DomainError("market: horizon must be positive");
    check_rate(r_hat, "r_hat", horizon);
    check_rate(c_plus, "c_plus", horizon);
    check_rate(c_minus, "c_minus", horizon);
    check_rate(f_plus, "f_plus", horizon);
    check_rate(f_minus, "f_minus", horizon);
    check_rate(h_plus, "h_plus", horizon);
    check_rate(h_minus, "h_minus", horizon);
    for (double t : sample_times(horizon, {&alpha_frac, &beta_frac})) {
        const double a = alpha_frac(t);
        const double b = beta_frac(t);
        if (!(a >= 0.0) || !(b <= 1.0) || !(a <= b)) {
            throw InvariantViolation("fraction_order", "need 0 <= alpha <= beta <= 1, violated at t = " + std::to_string(t) +
                                                           " (alpha = " + std::to_string(a) +
                                                           ", beta = " + std::to_string(b) + ")");
        }
    }
    if (!(lgd_I >= 0.0 && lgd_I <= 1.0)) throw InvariantViolation("lgd_range", "lgd_I must lie in [0, 1]");
    if (!(lgd_C >= 0.0 && lgd_C <= 1.0)) throw InvariantViolation("lgd_range", "lgd_C must lie in [0, 1]");
    if (dividend.kind == Dividend::Kind::callable && !dividend.fn) {
        throw InvariantViolation("dividend", "missing dividend function");
    }
    if (hedge.kind == Hedge::Kind::callable && (!hedge.fn || !(hedge.lipschitz >= 0.0))) {
        throw InvariantViolation("hedge_growth", "callable hedge needs a function and a Lipschitz constant");
    }
    payoff.validate();
    if (std::abs(defaults.horizon - horizon) > 1e-12) {
        throw InvariantViolation("horizon", "market and default horizons differ");
    }
    defaults.validate();
}

RateSnapshot snapshot(const MarketSpec& spec, double t) {
    RateSnapshot rs;
    rs.t = t;
    rs.r = spec.r_hat(t);
    rs.c_plus = spec.c_plus(t);
    rs.c_minus = spec.c_minus(t);
    rs.f_plus = spec.f_plus(t);
    rs.f_minus = spec.f_minus(t);
    rs.h_plus = spec.h_plus(t);
    rs.h_minus = spec.h_minus(t);
    rs.alpha = spec.alpha_frac(t);
    rs.beta = spec.beta_frac(t);
    rs.g_I = -spec.defaults.investor.hazard(t);
    rs.g_C = -spec.defaults.counterparty.hazard(t);
    rs.survival = spec.defaults.joint_survival(t);
    rs.dividend_state_free = spec.dividend.state_free();
    if (rs.dividend_state_free) rs.dividend = spec.dividend.level(t);

    const double a = rs.alpha;
    const double b = rs.beta;
    const double bank = spec.investor_is_bank ? 1.0 : 0.0;
    double p = -(rs.c_plus * a + rs.f_plus * (1.0 - a)) + rs.g_I * ((1.0 - b) - spec.lgd_I * (1.0 - a) * bank) +
               rs.g_C * ((1.0 - b) + spec.lgd_C * (b - a));
    double q = (rs.c_minus * a + rs.f_minus * (1.0 - a)) + rs.g_I * (-(1.0 - b) - spec.lgd_I * (b - a) * bank) -
               rs.g_C * (1.0 - b);
    rs.piecewise_linear = spec.hedge.kind != Hedge::Kind::callable;
    if (spec.hedge.kind == Hedge::Kind::proportional) {
        rs.delta = spec.hedge.delta(t);
        // H+ and H- split by the sign of delta * y.
        if (rs.delta >= 0.0) {
            p -= (rs.r - rs.h_plus) * rs.delta;
            q += (rs.r - rs.h_minus) * rs.delta;
        } else {
            p += (rs.r - rs.h_minus) * (-rs.delta);
            q -= (rs.r - rs.h_plus) * (-rs.delta);
        }
    }
    rs.slope_pos = p;
    rs.slope_neg = q;
    return rs;
}

double discount(const TimeFunction& r, double s, double t) {
    if (s > t) return 1.0;
    return std::exp(-r.integral(s, t));
}

double driver(const MarketSpec& spec, double t, double s, double v, double y) {
    if (!(s > 0.0)) throw DomainError("driver: price must be positive");
    if (!(v > 0.0)) throw DomainError("driver: quasi variance must be positive");
    const double r = spec.r_hat(t);
    const double a = spec.alpha_frac(t);
    const double b = spec.beta_frac(t);
    const double g_I = -spec.defaults.investor.hazard(t);
    const double g_C = -spec.defaults.counterparty.hazard(t);
    const double h = spec.hedge(t, s, v, y);
    const double bank = spec.investor_is_bank ? 1.0 : 0.0;
    return spec.dividend(t, s, v) - (spec.c_plus(t) * a + spec.f_plus(t) * (1.0 - a)) * pos(y) +
           (spec.c_minus(t) * a + spec.f_minus(t) * (1.0 - a)) * neg(y) - (r - spec.h_plus(t)) * pos(h) +
           (r - spec.h_minus(t)) * neg(h) +
           g_I * ((1.0 - b) * y - spec.lgd_I * ((b - a) * neg(y) + (1.0 - a) * pos(y)) * bank) +
           g_C * ((1.0 - b) * y + spec.lgd_C * (b - a) * pos(y));
}

double driver_at(const MarketSpec& spec, const RateSnapshot& rs, double s, double v, double y) {
    const double pi = rs.dividend_state_free ? rs.dividend : spec.dividend.fn(rs.t, s, v);
    if (rs.piecewise_linear) return pi + rs.slope_pos * pos(y) + rs.slope_neg * neg(y);
    const double h = spec.hedge.fn(rs.t, s, v, y);
    return pi + rs.slope_pos * pos(y) + rs.slope_neg * neg(y) - (rs.r - rs.h_plus) * pos(h) +
           (rs.r - rs.h_minus) * neg(h);
}

namespace {
double curve_value(const std::vector<double>& nodes, const std::vector<double>& values, double t) {
    if (t <= nodes.front()) return values.front();
    if (t >= nodes.back()) return values.back();
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - nodes.begin()) - 1;
    const double w = (t - nodes[i]) / (nodes[i + 1] - nodes[i]);
    return (1.0 - w) * values[i] + w * values[i + 1];
}
} // namespace

double a_process_increment(const MarketSpec& spec, const SurvivalCurve& curve, double t, double s, double v,
                           double y) {
    const double g = curve_value(curve.nodes, curve.g_joint, t);
    const double g_I = -spec.defaults.investor.hazard(t);
    const double g_C = -spec.defaults.counterparty.hazard(t);
    return g * (driver(spec, t, s, v, y) + (spec.r_hat(t) - g_I - g_C) * y);
}

double a_process_increment(const MarketSpec& spec, double t, double s, double v, double y) {
    const RateSnapshot rs = snapshot(spec, t);
    return rs.survival * (driver(spec, t, s, v, y) + (rs.r - rs.g_I - rs.g_C) * y);
}

double driver_lipschitz(const MarketSpec& spec, double t) {
    const RateSnapshot rs = snapshot(spec, t);
    double lambda = std::max(std::abs(rs.slope_pos), std::abs(rs.slope_neg));
    if (spec.hedge.kind == Hedge::Kind::callable) {
        lambda += std::max(std::abs(rs.r - rs.h_plus), std::abs(rs.r - rs.h_minus)) * spec.hedge.lipschitz;
    }
    return lambda;
}

std::vector<double> slab_boundaries(const MarketSpec& spec, double t0, double T, double budget, int min_slabs) {
    if (!(budget > 0.0)) throw DomainError("slab budget must be positive");
    min_slabs = std::max(1, min_slabs);
    constexpr int kFine = 2000;
    std::vector<double> t(kFine + 1);
    std::vector<double> cum(kFine + 1, 0.0);
    const double h = (T - t0) / kFine;
    // Midpoint sums keep the cumulative exact for piecewise-constant rates away from breaks.
    for (int i = 0; i <= kFine; ++i) t[i] = t0 + i * h;
    for (int i = 1; i <= kFine; ++i) cum[i] = cum[i - 1] + driver_lipschitz(spec, t0 + (i - 0.5) * h) * h;
    const double total = cum.back();
    const int m = std::max(min_slabs, static_cast<int>(std::ceil(total / budget * (1.0 + 1e-9))));
    std::vector<double> out{t0};
    for (int j = 1; j < m; ++j) {
        if (total == 0.0) {
            out.push_back(t0 + (T - t0) * j / m);
            continue;
        }
        const double target = total * j / m;
        const auto it = std::lower_bound(cum.begin(), cum.end(), target);
        const std::size_t i = static_cast<std::size_t>(it - cum.begin());
        const double w = (target - cum[i - 1]) / (cum[i] - cum[i - 1]);
        out.push_back(t[i - 1] + w * h);
    }
    out.push_back(T);
    return out;
}

std::optional<AffineDriver> affine_form(const MarketSpec& spec) {
    if (!spec.dividend.state_free() || spec.hedge.kind == Hedge::Kind::callable) return std::nullopt;
    const auto times = sample_times(spec.horizon, {&spec.r_hat, &spec.c_plus, &spec.c_minus, &spec.f_plus,
                                                   &spec.f_minus, &spec.h_plus, &spec.h_minus, &spec.alpha_frac,
                                                   &spec.beta_frac},
                                    257);
    for (double t : times) {
        const RateSnapshot rs = snapshot(spec, t);
        const double scale = std::max(1.0, std::abs(rs.slope_pos));
        if (std::abs(rs.slope_pos + rs.slope_neg) > 1e-12 * scale) return std::nullopt;
    }
    AffineDriver out;
    out.a = spec.dividend.level;
    const MarketSpec copy = spec;
    out.m = TimeFunction::callable([copy](double t) { return snapshot(copy, t).slope_pos; }, "driver_slope");
    return out;
}

BoundaryReport check_boundary(const MarketSpec& spec, double lower, double upper, const std::vector<double>& s_values,
                              const std::vector<double>& v_values, int n_times) {
    BoundaryReport rep;
    rep.lower = lower;
    rep.upper = upper;
    rep.min_at_lower = std::numeric_limits<double>::infinity();
    rep.max_at_upper = -std::numeric_limits<double>::infinity();
    rep.nonnegativity = true;
    for (int k = 0; k < n_times; ++k) {
        const double t = spec.horizon * (k + 0.5) / n_times;
        for (double s : s_values) {
            for (double v : v_values) {
                rep.min_at_lower = std::min(rep.min_at_lower, driver(spec, t, s, v, lower));
                rep.max_at_upper = std::max(rep.max_at_upper, driver(spec, t, s, v, upper));
                const double h0 = spec.hedge(t, s, v, 0.0);
                const double r = spec.r_hat(t);
                const double rhs = (r - spec.h_plus(t)) * pos(h0) - (r - spec.h_minus(t)) * neg(h0);
                if (spec.dividend(t, s, v) < rhs) rep.nonnegativity = false;
                ++rep.samples;
            }
        }
    }
    rep.holds = rep.min_at_lower >= 0.0 && rep.max_at_upper <= 0.0;
    return rep;
}

ResidualReport martingale_residual(const MarketSpec& spec, const VolModel& model_Q, const GridFunction& u,
                                   double t0, double x0, double v0, const std::vector<double>& checkpoints,
                                   std::size_t n_paths, std::uint64_t seed, const ResidualOptions& options) {
    const TimeGrid grid{t0, spec.horizon, options.n_steps};
    grid.validate();
    if (checkpoints.size() < 2) throw DomainError("martingale_residual: need at least two checkpoints");
    if (n_paths < 2) throw DomainError("martingale_residual: need at least two paths");

    std::vector<int> ck;
    for (double c : checkpoints) {
        const long k = std::lround((c - t0) / grid.dt());
        if (k < 0 || k > grid.n_steps) throw DomainError("martingale_residual: checkpoint outside [t0, T]");
        ck.push_back(static_cast<int>(k));
    }
    std::sort(ck.begin(), ck.end());
    ck.erase(std::unique(ck.begin(), ck.end()), ck.end());
    if (ck.size() < 2) throw DomainError("martingale_residual: checkpoints collapse on the grid");

    const auto n_steps = static_cast<std::size_t>(grid.n_steps);
    std::vector<RateSnapshot> rs(n_steps + 1);
    std::vector<double> disc(n_steps + 1);
    for (std::size_t k = 0; k <= n_steps; ++k) {
        const double t = grid.node(static_cast<int>(k));
        rs[k] = snapshot(spec, t);
        disc[k] = discount(spec.r_hat, t0, t);
    }
    const StepCoefficients coeffs = step_coefficients(model_Q, grid);
    const double dt = grid.dt();
    const std::size_t n_ck = ck.size();

    std::vector<double> m_at(n_paths * n_ck, 0.0);
    std::vector<std::uint8_t> valid(n_paths, 0);
    std::vector<std::size_t> outside(n_paths, 0);

    parallel_for(
        n_paths,
        [&](std::size_t begin, std::size_t end) {
            std::vector<double> z(2 * n_steps);
            for (std::size_t p = begin; p < end; ++p) {
                fill_normals(seed, p, z.data(), z.size());
                double integral = 0.0;
                double prev_da = 0.0;
                std::size_t next = 0;
                std::size_t out_count = 0;
                const bool ok = run_euler_path(model_Q, coeffs, x0, v0, z.data(), [&](int k, double x, double v) {
                    const auto kk = static_cast<std::size_t>(k);
                    const double t = grid.node(k);
                    const double s = std::exp(x);
                    if (!u.in_hull(t, x, v)) ++out_count;
                    const double y = kk == n_steps ? spec.payoff(s, v) : u(t, x, v);
                    const RateSnapshot& r = rs[kk];
                    const double da = disc[kk] * r.survival *
                                      (driver_at(spec, r, s, v, y) + (r.r - r.g_I - r.g_C) * y);
                    if (k > 0) integral += 0.5 * (prev_da + da) * dt;
                    prev_da = da;
                    if (next < n_ck && ck[next] == k) {
                        m_at[p * n_ck + next] = disc[kk] * y * r.survival + integral;
                        ++next;
                    }
                });
                valid[p] = ok ? 1 : 0;
                outside[p] = out_count;
            }
        },
        options.threads);

    std::size_t n_valid = 0;
    std::size_t n_outside = 0;
    for (std::size_t p = 0; p < n_paths; ++p) {
        if (!valid[p]) continue;
        ++n_valid;
        n_outside += outside[p];
    }
    if (static_cast<double>(n_paths - n_valid) > kInvalidPathBudget * static_cast<double>(n_paths)) {
        throw InvalidPathBudget(n_paths - n_valid, n_paths);
    }
    ResidualReport rep;
    rep.n = n_valid;
    rep.coverage_fraction = static_cast<double>(n_outside) / (static_cast<double>(n_valid) * (n_steps + 1));
    if (rep.coverage_fraction > options.coverage_limit) throw CoverageError(rep.coverage_fraction, options.coverage_limit);

    for (int k : ck) rep.checkpoints.push_back(grid.node(k));
    const double n = static_cast<double>(n_valid);
    for (std::size_t j = 0; j + 1 < n_ck; ++j) {
        double sum = 0.0;
        double sum_sq = 0.0;
        for (std::size_t p = 0; p < n_paths; ++p) {
            if (!valid[p]) continue;
            const double d = m_at[p * n_ck + j + 1] - m_at[p * n_ck + j];
            sum += d;
            sum_sq += d * d;
        }
        const double mean = sum / n;
        const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
        const double se = std::sqrt(var / n);
        rep.mean.push_back(mean);
        rep.stderr_.push_back(se);
        if (se > 0.0) rep.max_abs_z = std::max(rep.max_abs_z, std::abs(mean) / se);
        else if (mean != 0.0) rep.max_abs_z = std::numeric_limits<double>::infinity();
    }
    return rep;
}

} // namespace xva
