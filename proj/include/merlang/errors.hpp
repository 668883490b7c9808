#pragma once

#include <stdexcept>
#include <string>

namespace merlang {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid model or function parameters.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A series did not converge within its caps, or a coefficient overflowed.
class TruncationError : public Error {
public:
    TruncationError(const std::string& what, double last_term = 0.0)
        : Error(what), last_term_(last_term) {}
    double last_term() const { return last_term_; }

private:
    double last_term_;
};

/// A request exceeded a configured policy cap.
class PolicyError : public Error {
public:
    using Error::Error;
};

/// Argument outside the region where an evaluator is defined.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A numerical oracle (contour inversion, matrix exponential) failed.
class OracleError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Simulated path exceeded its event cap.
class RunawayError : public Error {
public:
    using Error::Error;
};

}  // namespace merlang
