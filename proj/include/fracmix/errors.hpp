#pragma once

#include <stdexcept>
#include <string>

namespace fracmix {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Gamma evaluated at 0, -1, -2, ...
struct PoleError : Error {
    using Error::Error;
};

// Series did not reach its tail tolerance inside the term budget.
struct ConvergenceError : Error {
    using Error::Error;
};

// Cancellation could not be cured even in high precision.
struct CancellationError : Error {
    using Error::Error;
};

struct ConstraintError : Error {
    using Error::Error;
};

struct QuadratureError : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

struct MissingDerivativeError : Error {
    using Error::Error;
};

// A denominator of the reconstruction formulas vanished.
struct DivisionError : Error {
    DivisionError(const std::string& what, int k_, double value_)
        : Error(what), k(k_), value(value_) {}
    int k;
    double value;
};

// Determinant of a mode system is zero within tolerance; k = 0 is the mean mode.
struct SolvabilityError : Error {
    SolvabilityError(const std::string& what, int k_, double delta_)
        : Error(what), k(k_), delta(delta_) {}
    int k;
    double delta;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace fracmix
