#pragma once

#include <limits>
#include <string>
#include <vector>

#include "pmhd/geometry.hpp"

namespace pmhd {

// ---------------------------------------------------------------------------
// Analytic field families. All derivatives are closed-form; no differencing
// happens anywhere in field evaluation, so asymptotic-formula errors are not
// polluted by differentiation error.
// ---------------------------------------------------------------------------

enum class BFamily { constant, sinusoidal, gaussian, exponential };
enum class U0Family { constant, rigid_rotation, gaussian_modulated };
enum class Rho0Family { constant, gaussian, sinusoidal };

/// Magnetic intensity b(x) > 0.
struct BField {
    BFamily family = BFamily::constant;
    double b0 = 1.0;          // base value (all families)
    double amplitude = 0.0;   // sinusoidal / gaussian
    Vec2 wavevector{1, 0};    // sinusoidal: b0 + amplitude*sin(k.x)
    Vec2 center{0, 0};        // gaussian bump center
    double sigma = 1.0;       // gaussian width
    double lambda = 0.0;      // exponential: b0*exp(lambda*x1)
    double window_lo = -1.0;  // exponential: admissible x1 window
    double window_hi = 1.0;

    double value(Vec2 x) const;
    Vec2 gradient(Vec2 x) const;
    Mat2 hessian(Vec2 x) const;
};

/// Initial velocity u0(x).
struct U0Field {
    U0Family family = U0Family::constant;
    Vec2 vector{1, 0};     // constant / modulated direction
    double omega = 0.0;    // rigid rotation: omega * perp(x)
    Vec2 center{0, 0};     // gaussian modulation center
    double sigma = 1.0;    // gaussian modulation width

    Vec2 value(Vec2 x) const;
    Mat2 jacobian(Vec2 x) const;
};

/// Initial density rho0(x) >= 0.
struct Rho0Field {
    Rho0Family family = Rho0Family::constant;
    double base = 1.0;
    double amplitude = 0.0;
    Vec2 center{0, 0};
    double sigma = 1.0;
    Vec2 wavevector{1, 0};

    double value(Vec2 x) const;
    Vec2 gradient(Vec2 x) const;
};

/// The full parametric data of one experiment: b, u0, rho0.
struct FieldSpec {
    BField b;
    U0Field u0;
    Rho0Field rho0;

    /// Throws ConfigError on invalid parameters (e.g. sinusoidal b with
    /// b0 - |amplitude| <= 0, which would violate inf b > 0).
    void validate() const;
};

/// Exact pointwise evaluation of all fields and derivatives.
struct FieldEval {
    double b;
    Vec2 grad_b;
    Mat2 hess_b;
    Vec2 u0;
    Mat2 jac_u0;
    double rho0;
    Vec2 grad_rho0;
};

FieldEval eval_fields(const FieldSpec& spec, Vec2 x);

/// Guiding-center drift  v(x) = (1/2b^2) [ (u0perp.grad b) u0 - (u0.grad b) u0perp ].
/// Perpendicular to grad b by construction.
Vec2 drift_velocity(const FieldSpec& spec, Vec2 x);

// ---------------------------------------------------------------------------
// Hypothesis checking on a sampled rectangle.
// ---------------------------------------------------------------------------

/// Uniform sampling grid used to estimate sup/inf norms.
struct DomainSample {
    Rect rect{{-1, -1}, {1, 1}};
    int resolution = 64;  // points per axis, >= 2

    void validate() const;
    std::vector<Vec2> nodes() const;
};

/// Sup/inf norms of the fields plus the lifespan lower bound
/// t_star = 1 / (||u0|| * ||grad b||)  (+inf when the denominator vanishes).
struct HypothesisReport {
    double b_min = 0;
    double b_sup = 0;
    double grad_b_sup = 0;
    double hess_b_sup = 0;
    double u0_sup = 0;
    double grad_u0_sup = 0;
    double t_star = std::numeric_limits<double>::infinity();
};

/// Exhaustive evaluation over the grid. Throws HypothesisError (with the
/// offending node) if the estimated inf b is not positive.
HypothesisReport check_hypotheses(const FieldSpec& spec, const DomainSample& domain);

/// Closed-form global envelope of the same norms (per family, over R^2, or
/// over `rect` for families unbounded at infinity). Upper bounds are true
/// upper bounds, lower bounds true lower bounds, so a priori bound checks
/// built from the envelope are rigorous where grid sups could undershoot.
HypothesisReport hypothesis_envelope(const FieldSpec& spec, const Rect& rect);

double t_star_from(double u0_sup, double grad_b_sup);

}  // namespace pmhd
