#pragma once

#include <stdexcept>
#include <string>

namespace abridge {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Observation window violates 0 <= t < T (or T - t outside a formula's domain).
struct InvalidWindow : Error {
    using Error::Error;
};

/// Malformed time grid (too few points, not strictly increasing, ...).
struct InvalidGrid : Error {
    using Error::Error;
};

/// A computation left the regime in which it is defined (e.g. alpha <= 1/2).
struct RegimeError : Error {
    using Error::Error;
};

/// Hypothesis of a lemma-domain quantity violated (e.g. T - t >= 1/e).
struct DomainError : Error {
    using Error::Error;
};

/// Path with zero observed information; the MLE is undefined.
struct DegeneratePath : Error {
    using Error::Error;
};

/// Empty or non-finite input samples.
struct InvalidInput : Error {
    using Error::Error;
};

/// Quadrature non-convergence or non-finite intermediate values.
struct NumericalFailure : Error {
    double achieved_tolerance;
    explicit NumericalFailure(const std::string& msg, double achieved = 0.0)
        : Error(msg), achieved_tolerance(achieved) {}
};

/// Bad run configuration (CLI or config file).
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace abridge
