#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace prevalence {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (q outside [0,1], non-finite x, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// The sample carries no information about q: f1(z) == f0(z) at every point.
class DegeneracyError : public Error {
public:
    using Error::Error;
};

/// The requested operation is not supported by this density family.
class CapabilityError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double last_iterate, std::size_t iterations)
        : Error(what), last_iterate_(last_iterate), iterations_(iterations) {}

    double last_iterate() const noexcept { return last_iterate_; }
    std::size_t iterations() const noexcept { return iterations_; }

private:
    double last_iterate_;
    std::size_t iterations_;
};

/// Adaptive quadrature ran out of subdivisions. Carries the best estimate reached.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double estimate, double error_bound)
        : Error(what), estimate_(estimate), error_bound_(error_bound) {}

    double estimate() const noexcept { return estimate_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double estimate_;
    double error_bound_;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line) : Error(what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace prevalence
