// errors.hpp — exception taxonomy shared by all modules

#pragma once

#include <stdexcept>
#include <string>

namespace usc {

// Bad job document or physically invalid parameters (exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An iterative routine failed to reach its tolerance (exit code 3).
struct ConvergenceError : std::runtime_error {
    double achieved{0.0};
    ConvergenceError(const std::string& msg, double res)
        : std::runtime_error(msg), achieved(res) {}
};

// A quadratic form has a non-positive squared normal frequency (exit code 4).
struct InstabilityError : std::runtime_error {
    double margin{0.0};  // most negative squared frequency
    InstabilityError(const std::string& msg, double m)
        : std::runtime_error(msg), margin(m) {}
};

// Requested Hilbert-space dimension exceeds the configured cap (exit code 5).
struct DimensionCapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Mismatched basis/spec shapes, out-of-range indices and the like.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace usc
