#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spdelab {

/// Precondition or shape violation in a library call.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A discrete solve broke down (singular tridiagonal, non-finite values, blow-up).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative solver exhausted its iteration budget.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, std::size_t iterations, double residual)
        : std::runtime_error(what), iterations_(iterations), residual_(residual) {}

    std::size_t iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    std::size_t iterations_;
    double residual_;
};

}  // namespace spdelab
