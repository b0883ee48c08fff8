#include "xva/time_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "xva/errors.hpp"

namespace xva {

TimeFunction::TimeFunction(double value) : values_{value} {
    if (!std::isfinite(value)) throw DomainError("time function: constant must be finite");
}

TimeFunction TimeFunction::constant(double value) { return TimeFunction(value); }

TimeFunction TimeFunction::piecewise(std::vector<double> breaks, std::vector<double> values) {
    if (values.size() != breaks.size() + 1) {
        throw DomainError("time function: need exactly one more value than breaks");
    }
    for (std::size_t i = 0; i < breaks.size(); ++i) {
        if (!std::isfinite(breaks[i]) || (i > 0 && !(breaks[i] > breaks[i - 1]))) {
            throw DomainError("time function: breaks must be finite and strictly increasing");
        }
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw DomainError("time function: values must be finite");
    }
    if (breaks.empty()) return TimeFunction(values.front());
    TimeFunction f;
    f.kind_ = Kind::piecewise;
    f.breaks_ = std::move(breaks);
    f.values_ = std::move(values);
    return f;
}

TimeFunction TimeFunction::callable(std::function<double(double)> fn, std::string label) {
    if (!fn) throw DomainError("time function: empty callable");
    TimeFunction f;
    f.kind_ = Kind::callable;
    f.fn_ = std::move(fn);
    f.label_ = std::move(label);
    return f;
}

double TimeFunction::operator()(double t) const {
    switch (kind_) {
    case Kind::constant:
        return values_.front();
    case Kind::piecewise: {
        const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
        return values_[static_cast<std::size_t>(it - breaks_.begin())];
    }
    case Kind::callable:
        return fn_(t);
    }
    return 0.0;
}

double TimeFunction::integral(double a, double b) const {
    if (a == b) return 0.0;
    if (b < a) return -integral(b, a);
    switch (kind_) {
    case Kind::constant:
        return values_.front() * (b - a);
    case Kind::piecewise: {
        double total = 0.0;
        double left = a;
        auto it = std::upper_bound(breaks_.begin(), breaks_.end(), a);
        while (left < b) {
            const std::size_t idx = static_cast<std::size_t>(it - breaks_.begin());
            const double right = (it == breaks_.end()) ? b : std::min(*it, b);
            total += values_[idx] * (right - left);
            left = right;
            if (it != breaks_.end()) ++it;
        }
        return total;
    }
    case Kind::callable:
        return integrate(fn_, a, b);
    }
    return 0.0;
}

double TimeFunction::sup(double a, double b) const {
    if (b < a) std::swap(a, b);
    switch (kind_) {
    case Kind::constant:
        return values_.front();
    case Kind::piecewise: {
        double best = (*this)(a);
        for (std::size_t i = 0; i < breaks_.size(); ++i) {
            if (breaks_[i] > a && breaks_[i] < b) best = std::max(best, values_[i + 1]);
        }
        return best;
    }
    case Kind::callable: {
        double best = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < kScanPoints; ++i) {
            best = std::max(best, fn_(a + (b - a) * i / (kScanPoints - 1)));
        }
        return best;
    }
    }
    return 0.0;
}

double TimeFunction::inf(double a, double b) const {
    if (b < a) std::swap(a, b);
    switch (kind_) {
    case Kind::constant:
        return values_.front();
    case Kind::piecewise: {
        double best = (*this)(a);
        for (std::size_t i = 0; i < breaks_.size(); ++i) {
            if (breaks_[i] > a && breaks_[i] < b) best = std::min(best, values_[i + 1]);
        }
        return best;
    }
    case Kind::callable: {
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < kScanPoints; ++i) {
            best = std::min(best, fn_(a + (b - a) * i / (kScanPoints - 1)));
        }
        return best;
    }
    }
    return 0.0;
}

double TimeFunction::sup_abs(double a, double b) const {
    return std::max(std::abs(sup(a, b)), std::abs(inf(a, b)));
}

TimeFunction TimeFunction::plus(double shift) const {
    if (kind_ == Kind::callable) {
        auto fn = fn_;
        return callable([fn, shift](double t) { return fn(t) + shift; }, label_);
    }
    TimeFunction out = *this;
    for (double& v : out.values_) v += shift;
    return out;
}

double integrate(const std::function<double(double)>& fn, double a, double b, double tol) {
    if (a == b) return 0.0;
    double error = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(fn, a, b, 15, tol, &error);
}

} // namespace xva
