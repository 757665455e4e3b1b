// errors.hpp: exception hierarchy shared by every qbt module

#pragma once

#include <stdexcept>
#include <string>

namespace qbt {

// Base of everything the library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// Argument sits on (or within tolerance of) a pole.
class PoleError : public DomainError {
public:
    using DomainError::DomainError;
};

// A parameter point the closed-form machinery cannot handle (e.g. repeated roots).
class UnsupportedParameterError : public Error {
public:
    using Error::Error;
};

// Covariance matrix violating the uncertainty relation.
class PhysicalityError : public Error {
public:
    using Error::Error;
};

// An iterative or extrapolated estimate that did not settle.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double estimate, double error_estimate)
        : Error(what), estimate_(estimate), error_estimate_(error_estimate) {}

    double estimate() const noexcept { return estimate_; }
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double estimate_;
    double error_estimate_;
};

// Adaptive quadrature that missed its error target; carries the partial result.
class QuadratureError : public ConvergenceError {
public:
    using ConvergenceError::ConvergenceError;
};

}  // namespace qbt
