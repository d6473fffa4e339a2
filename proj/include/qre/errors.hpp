#pragma once

#include <stdexcept>
#include <string>

namespace qre {

// Error categories shared by the C++ core and the C API status codes.
enum class ErrorCode {
    domain_error,          // invalid argument / out-of-range input
    constraint_infeasible, // style parameters cannot satisfy the moment constraint
    unsupportable_type,    // indifferent type outside the admissible set
    infeasible_extension,  // symmetric completion exits the type space
    slack_infeasible,      // tail cannot absorb the mean constraint
    degenerate_strategy,   // no threshold state / no usable crossing
    no_crossing,           // estimate never reaches the 1/2 level
    insufficient_data,     // empty split side, too few observations
    parse_error,           // malformed file input
    convergence_failure,   // iteration did not reach tolerance
    unstable_estimate,     // too many bootstrap replicates failed
    precondition_failed,   // operation called on an object that fails its gate
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorCode::domain_error, what) {}
};

class ConstraintError : public Error {
public:
    ConstraintError(ErrorCode code, const std::string& what) : Error(code, what) {}
};

class DegenerateStrategyError : public Error {
public:
    explicit DegenerateStrategyError(const std::string& what)
        : Error(ErrorCode::degenerate_strategy, what) {}
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, long line = -1)
        : Error(ErrorCode::parse_error,
                line >= 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}

    long line() const noexcept { return line_; }

private:
    long line_;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double last_residual)
        : Error(ErrorCode::convergence_failure, what), last_residual_(last_residual) {}

    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

class UnstableEstimateError : public Error {
public:
    explicit UnstableEstimateError(const std::string& what)
        : Error(ErrorCode::unstable_estimate, what) {}
};

} // namespace qre
