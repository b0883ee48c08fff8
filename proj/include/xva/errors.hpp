#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace xva {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The requested formula diverges at the given input.
class SingularInputError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A model or market object violates a structural condition; `condition()`
/// names it (for example "feller" or "fraction_order").
class InvariantViolation : public std::invalid_argument {
public:
    InvariantViolation(std::string condition, const std::string& message)
        : std::invalid_argument(condition + ": " + message), condition_(std::move(condition)) {}

    const std::string& condition() const noexcept { return condition_; }

private:
    std::string condition_;
};

/// An operation requires a model regularity flag that was not declared.
class ConditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Too many simulated states fell outside the interpolation hull.
class CoverageError : public std::runtime_error {
public:
    CoverageError(double fraction, double limit)
        : std::runtime_error("coverage: " + std::to_string(fraction * 100.0) +
                             "% of visited states outside the grid hull (limit " +
                             std::to_string(limit * 100.0) + "%)"),
          fraction_(fraction) {}

    double fraction() const noexcept { return fraction_; }

private:
    double fraction_;
};

/// The share of non-finite simulated paths exceeded the allowed budget.
class InvalidPathBudget : public std::runtime_error {
public:
    InvalidPathBudget(std::size_t invalid, std::size_t total)
        : std::runtime_error(std::to_string(invalid) + " of " + std::to_string(total) +
                             " simulated paths are non-finite"),
          invalid_(invalid), total_(total) {}

    std::size_t invalid() const noexcept { return invalid_; }
    std::size_t total() const noexcept { return total_; }

private:
    std::size_t invalid_;
    std::size_t total_;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A finite-difference probe lies too close to the grid boundary.
class MarginError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace xva
