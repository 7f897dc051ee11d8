#pragma once

#include "pmhd/fields.hpp"
#include "pmhd/geometry.hpp"

namespace pmhd {

/// Explicit first-order phase  b(x) t / eps - t (u0perp . grad) log b(x).
/// Predicts phi(t,x)/eps along the trajectory up to O(eps).
double phase_tilde(const FieldSpec& spec, Vec2 x, double t, double eps);

/// First-order trajectory with guiding-center drift:
///   x + eps (u0/b) sin(phi/eps) - eps (u0perp/b) (1 - cos(phi/eps)) - eps t v(x).
/// `phi` is the accumulated phase (numeric phi(t,x), or eps * phase_tilde).
Vec2 approx_X(const FieldSpec& spec, Vec2 x, double t, double eps, double phi);

struct DXJPrediction {
    Mat2 DX_pred;
    double J_pred;  // 1 + trace of the rank-one perturbation
};

/// First-order flow gradient and Jacobian:
///   DX ~ Id + t (u0 ox grad log b) cos(phi/eps) - t (u0perp ox grad log b) sin(phi/eps)
///   J  ~ 1 + t (u0 . grad log b) cos(phi/eps) - t (u0perp . grad log b) sin(phi/eps).
/// The perturbation is rank one, so the trace form is determinant-consistent.
DXJPrediction approx_DX_J(const FieldSpec& spec, Vec2 x, double t, double eps, double phi);

struct PhaseSolution {
    double theta = 0;
    int iterations = 0;
    double residual = 0;
    double contraction_factor = 0;  // L = t (|u0.grad log b| + |u0perp.grad log b|)
};

/// Solve the implicit Eulerian phase
///   theta = b(x) t/eps - t (u0.grad log b) sin(theta) + t (u0perp.grad log b) cos(theta)
/// by plain fixed-point iteration from theta0 = b t/eps while L < 0.9, and by
/// bisection-safeguarded Newton otherwise. Unique for L < 1.
/// Throws PhaseSolveError (carrying L) on non-convergence.
PhaseSolution solve_theta(const FieldSpec& spec, Vec2 x, double t, double eps,
                          double tol = 1e-12);

enum class Frame { lagrangian, eulerian };

/// Rotated initial velocity u0(x) cos(phase) - u0perp(x) sin(phase) with the
/// lagrangian phase phase_tilde (predicts u(t, X(t,x))) or the eulerian phase
/// theta (predicts u(t, x)). Speed is |u0(x)| exactly in both frames.
Vec2 predict_u(const FieldSpec& spec, Vec2 x, double t, double eps, Frame frame);

/// The two trig attachments the asymptotic density statements use, and the
/// two overall signs; all four are runtime-selectable and the sweep harness
/// adjudicates which matches the measured density.
enum class RhoVariant { theorem_form, prop_form };  // (cos,sin) vs (sin,cos)
enum class RhoSign { paper, flipped };              // (+,-) vs (-,+)

double predict_rho(const FieldSpec& spec, Vec2 x, double t, double eps, Frame frame,
                   RhoVariant variant, RhoSign sign = RhoSign::paper);

/// Closed-form predictions bundled for one (x, t, eps).
struct AsymptoticPrediction {
    Vec2 X_pred;
    Mat2 DX_pred;
    double J_pred;
    Vec2 u_pred;
    double rho_pred;
    int remainder_order;      // 2 for the trajectory, 1 otherwise
    const char* phase_used;   // "numeric" | "tilde" | "theta"
};

/// Assemble all predictors at once. With `phi_numeric` set, the trajectory /
/// DX / J predictions use it; otherwise they use eps * phase_tilde.
AsymptoticPrediction make_prediction(const FieldSpec& spec, Vec2 x, double t, double eps,
                                     Frame frame, RhoVariant variant, RhoSign sign,
                                     const double* phi_numeric = nullptr);

}  // namespace pmhd
