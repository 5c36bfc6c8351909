#pragma once

#include <stdexcept>
#include <string>

namespace semiclass {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the requested operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Which clause of the single-well geometry check failed.
enum class Clause {
    multiple_crossings,
    no_crossing,
    critical_turning_point,
    insufficient_growth,
    below_well_bottom,
    singular_turning_point,
    unsupported_singularity,
};

const char* to_string(Clause clause);

class CertificationError : public Error {
public:
    CertificationError(Clause clause, const std::string& what)
        : Error(std::string(to_string(clause)) + ": " + what), clause_(clause) {}

    Clause clause() const noexcept { return clause_; }

private:
    Clause clause_;
};

/// An iterative method (root finder, quadrature, grid refinement) did not converge.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Malformed potential or run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace semiclass
