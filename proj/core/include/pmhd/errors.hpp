#pragma once

#include <stdexcept>
#include <string>

#include "pmhd/geometry.hpp"

namespace pmhd {

/// Invalid family parameters or malformed experiment configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Field hypothesis violated (inf b <= 0 on the working domain).
struct HypothesisError : std::runtime_error {
    HypothesisError(const std::string& msg, Vec2 where)
        : std::runtime_error(msg), offending_point(where) {}
    Vec2 offending_point;
};

/// Trajectory left the declared domain rectangle.
struct DomainExitError : std::runtime_error {
    DomainExitError(const std::string& msg, double t)
        : std::runtime_error(msg), exit_time(t) {}
    double exit_time;
};

/// Jacobian lost positivity along a trajectory (characteristics crossed).
struct CausticError : std::runtime_error {
    CausticError(const std::string& msg, double t)
        : std::runtime_error(msg), crossing_time(t) {}
    double crossing_time;
};

/// Oscillatory sample grid does not resolve the oscillation period.
struct ResolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Implicit phase equation did not converge within the iteration cap.
struct PhaseSolveError : std::runtime_error {
    PhaseSolveError(const std::string& msg, double contraction)
        : std::runtime_error(msg), contraction_factor(contraction) {}
    double contraction_factor;
};

/// Newton inversion of the flow map failed (divergence or singular DX).
struct InversionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace pmhd
