#pragma once

#include <cstddef>
#include <vector>

namespace xva {

/// Strictly increasing coordinate axis with a fast path for uniform spacing.
class Axis {
public:
    Axis() = default;
    explicit Axis(std::vector<double> nodes);
    static Axis uniform(double lo, double hi, std::size_t n);

    std::size_t size() const noexcept { return nodes_.size(); }
    double operator[](std::size_t i) const { return nodes_[i]; }
    const std::vector<double>& nodes() const noexcept { return nodes_; }
    double front() const { return nodes_.front(); }
    double back() const { return nodes_.back(); }
    bool is_uniform() const noexcept { return uniform_; }
    double spacing() const noexcept { return spacing_; } // uniform only
    bool contains(double x) const { return x >= nodes_.front() && x <= nodes_.back(); }

    /// Cell index i and weight w with x ~ (1-w) node[i] + w node[i+1], clamped
    /// to the axis (flat extrapolation). Single-node axes return (0, 0).
    void locate(double x, std::size_t& i, double& w) const;

private:
    std::vector<double> nodes_;
    bool uniform_ = false;
    double spacing_ = 0.0;
};

/// Function on a rectangular (t, x, v) grid with trilinear interpolation and
/// flat extrapolation. Storage is x-fastest: index (it * nv + iv) * nx + ix.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(Axis t, Axis x, Axis v, double fill = 0.0);

    const Axis& t() const noexcept { return t_; }
    const Axis& x() const noexcept { return x_; }
    const Axis& v() const noexcept { return v_; }
    std::size_t nt() const noexcept { return t_.size(); }
    std::size_t nx() const noexcept { return x_.size(); }
    std::size_t nv() const noexcept { return v_.size(); }
    std::size_t size() const noexcept { return values_.size(); }

    std::size_t index(std::size_t it, std::size_t ix, std::size_t iv) const { return (it * nv() + iv) * nx() + ix; }
    double& at(std::size_t it, std::size_t ix, std::size_t iv) { return values_[index(it, ix, iv)]; }
    double at(std::size_t it, std::size_t ix, std::size_t iv) const { return values_[index(it, ix, iv)]; }
    const double* row(std::size_t it, std::size_t iv) const { return &values_[index(it, 0, iv)]; }
    double* row(std::size_t it, std::size_t iv) { return &values_[index(it, 0, iv)]; }
    std::vector<double>& values() noexcept { return values_; }
    const std::vector<double>& values() const noexcept { return values_; }

    double operator()(double t, double x, double v) const;

    bool in_hull(double t, double x, double v) const { return t_.contains(t) && x_.contains(x) && v_.contains(v); }
    double sup_abs() const;
    /// Throws DomainError on non-finite values or non-positive v nodes.
    void validate() const;

private:
    Axis t_, x_, v_;
    std::vector<double> values_;
};

} // namespace xva
