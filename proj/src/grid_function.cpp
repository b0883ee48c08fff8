#include "xva/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "xva/errors.hpp"

namespace xva {

Axis::Axis(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw DomainError("axis: needs at least one node");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (!std::isfinite(nodes_[i])) throw DomainError("axis: nodes must be finite");
        if (i > 0 && !(nodes_[i] > nodes_[i - 1])) throw DomainError("axis: nodes must be strictly increasing");
    }
    if (nodes_.size() >= 2) {
        const double h = (nodes_.back() - nodes_.front()) / static_cast<double>(nodes_.size() - 1);
        uniform_ = true;
        for (std::size_t i = 1; i < nodes_.size(); ++i) {
            if (std::abs(nodes_[i] - nodes_[i - 1] - h) > 1e-12 * std::max(1.0, std::abs(h))) {
                uniform_ = false;
                break;
            }
        }
        if (uniform_) spacing_ = h;
    }
}

Axis Axis::uniform(double lo, double hi, std::size_t n) {
    if (n == 1) return Axis({lo});
    if (n < 1 || !(hi > lo)) throw DomainError("axis: need hi > lo and n >= 1");
    std::vector<double> nodes(n);
    for (std::size_t i = 0; i < n; ++i) nodes[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    nodes.back() = hi;
    return Axis(std::move(nodes));
}

void Axis::locate(double x, std::size_t& i, double& w) const {
    const std::size_t n = nodes_.size();
    if (n == 1 || x <= nodes_.front()) {
        i = 0;
        w = 0.0;
        return;
    }
    if (x >= nodes_.back()) {
        i = n - 2;
        w = 1.0;
        return;
    }
    if (uniform_) {
        const double pos = (x - nodes_.front()) / spacing_;
        i = std::min(static_cast<std::size_t>(pos), n - 2);
        w = pos - static_cast<double>(i);
        return;
    }
    const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
    i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
    w = (x - nodes_[i]) / (nodes_[i + 1] - nodes_[i]);
}

GridFunction::GridFunction(Axis t, Axis x, Axis v, double fill)
    : t_(std::move(t)), x_(std::move(x)), v_(std::move(v)), values_(t_.size() * x_.size() * v_.size(), fill) {}

double GridFunction::operator()(double t, double x, double v) const {
    std::size_t it, ix, iv;
    double wt, wx, wv;
    t_.locate(t, it, wt);
    x_.locate(x, ix, wx);
    v_.locate(v, iv, wv);
    const std::size_t jt = nt() > 1 ? it + 1 : it;
    const std::size_t jx = nx() > 1 ? ix + 1 : ix;
    const std::size_t jv = nv() > 1 ? iv + 1 : iv;
    auto lerp_x = [&](std::size_t a, std::size_t b) {
        return (1.0 - wx) * at(a, ix, b) + wx * at(a, jx, b);
    };
    const double c0 = (1.0 - wv) * lerp_x(it, iv) + wv * lerp_x(it, jv);
    const double c1 = (1.0 - wv) * lerp_x(jt, iv) + wv * lerp_x(jt, jv);
    return (1.0 - wt) * c0 + wt * c1;
}

double GridFunction::sup_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

void GridFunction::validate() const {
    if (v_.size() == 0 || v_.front() <= 0.0) throw DomainError("grid function: v nodes must be positive");
    for (double v : values_) {
        if (!std::isfinite(v)) throw DomainError("grid function: non-finite value");
    }
}

} // namespace xva
