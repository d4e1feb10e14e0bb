#pragma once

#include <stdexcept>
#include <string>

namespace qnsplit {

/// Shape disagreement between an operand and the operator consuming it.
class DimensionError : public std::invalid_argument {
public:
    DimensionError(const std::string& what, long expected, long actual)
        : std::invalid_argument(what + ": expected dimension " + std::to_string(expected) +
                                ", got " + std::to_string(actual)),
          expected_(expected), actual_(actual) {}

    long expected() const noexcept { return expected_; }
    long actual() const noexcept { return actual_; }

private:
    long expected_;
    long actual_;
};

/// Invalid parameters handed to a builder or prox (lo > hi, odd pairing, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A metric or problem breaks a standing assumption (positive definiteness,
/// cocoercivity margin, ...).
class AssumptionViolation : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Root finding for the low-rank resolvent did not reach its tolerance.
class RootSolveError : public std::runtime_error {
public:
    RootSolveError(const std::string& what, double best_residual)
        : std::runtime_error(what + " (best residual " + std::to_string(best_residual) + ")"),
          best_residual_(best_residual) {}

    double best_residual() const noexcept { return best_residual_; }

private:
    double best_residual_;
};

/// A solver loop failed at a given iteration; wraps the underlying cause.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, long iteration)
        : std::runtime_error("iteration " + std::to_string(iteration) + ": " + what),
          iteration_(iteration) {}

    long iteration() const noexcept { return iteration_; }

private:
    long iteration_;
};

}  // namespace qnsplit
