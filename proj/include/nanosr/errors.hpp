#pragma once

#include <stdexcept>
#include <string>

namespace nanosr {

// Argument and precondition failures use std::invalid_argument directly.
// The types below carry the failure classes the runner maps to exit codes.

/// Geometry that a coupling source cannot represent (e.g. tilted dipoles for zz-only tables).
struct UnsupportedGeometry : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Dissipative matrix failed the positive-semidefiniteness check.
struct NotPositiveSemidefinite : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Requested problem exceeds a hard resource guard (exact solver with too many emitters).
struct ResourceGuardError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Adaptive integration could not satisfy the tolerances.
struct IntegrationError : std::runtime_error {
    IntegrationError(const std::string& what, double t)
        : std::runtime_error(what + " (t = " + std::to_string(t) + " fs)"), time(t) {}
    double time;
};

/// Configuration file could not be parsed or is inconsistent.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace nanosr
