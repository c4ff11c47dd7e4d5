#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace icbf {

// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Solver did not converge, lost precision, or hit an iteration cap.
struct NumericalError : Error {
    using Error::Error;
};

// Matrix is singular or too ill-conditioned to invert.
struct SingularityError : NumericalError {
    using NumericalError::NumericalError;
};

// Constraint set has no solution. `conflicting` lists the offending
// constraint indices in the problem's row numbering.
struct InfeasibleError : Error {
    std::vector<int> conflicting;
    explicit InfeasibleError(const std::string& msg, std::vector<int> rows = {})
        : Error(msg), conflicting(std::move(rows)) {}
};

// Vector field evaluated to a non-finite value during integration.
struct IntegrationError : NumericalError {
    double t;
    std::vector<double> x;
    IntegrationError(const std::string& msg, double t_, std::vector<double> x_)
        : NumericalError(msg), t(t_), x(std::move(x_)) {}
};

// Invalid scenario configuration (bad key, bad value, violated bound).
struct ConfigError : Error {
    using Error::Error;
};

// File could not be read or written.
struct IoError : Error {
    using Error::Error;
};

}  // namespace icbf
