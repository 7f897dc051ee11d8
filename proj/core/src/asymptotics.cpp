#include "pmhd/asymptotics.hpp"

#include <cmath>

#include "pmhd/errors.hpp"

namespace pmhd {

namespace {

struct PhaseCoeffs {
    double base;  // b(x) t / eps
    double A;     // t * u0.grad log b
    double B;     // t * u0perp.grad log b
};

PhaseCoeffs phase_coeffs(const FieldSpec& spec, Vec2 x, double t, double eps) {
    double b = spec.b.value(x);
    Vec2 glogb = (1.0 / b) * spec.b.gradient(x);
    Vec2 u = spec.u0.value(x);
    return {b * t / eps, t * dot(u, glogb), t * dot(perp(u), glogb)};
}

}  // namespace

double phase_tilde(const FieldSpec& spec, Vec2 x, double t, double eps) {
    PhaseCoeffs pc = phase_coeffs(spec, x, t, eps);
    return pc.base - pc.B;
}

Vec2 approx_X(const FieldSpec& spec, Vec2 x, double t, double eps, double phi) {
    double b = spec.b.value(x);
    Vec2 u = spec.u0.value(x);
    Vec2 up = perp(u);
    double c = std::cos(phi / eps), s = std::sin(phi / eps);
    return x + (eps / b) * s * u - (eps / b) * (1.0 - c) * up - eps * t * drift_velocity(spec, x);
}

DXJPrediction approx_DX_J(const FieldSpec& spec, Vec2 x, double t, double eps, double phi) {
    double b = spec.b.value(x);
    Vec2 glogb = (1.0 / b) * spec.b.gradient(x);
    Vec2 u = spec.u0.value(x);
    Vec2 up = perp(u);
    double c = std::cos(phi / eps), s = std::sin(phi / eps);
    Mat2 A = t * c * outer(u, glogb) - t * s * outer(up, glogb);
    DXJPrediction out;
    out.DX_pred = Mat2::identity() + A;
    out.J_pred = 1.0 + trace(A);
    return out;
}

PhaseSolution solve_theta(const FieldSpec& spec, Vec2 x, double t, double eps, double tol) {
    PhaseCoeffs pc = phase_coeffs(spec, x, t, eps);
    const double L = std::abs(pc.A) + std::abs(pc.B);
    auto rhs = [&](double th) { return pc.base - pc.A * std::sin(th) + pc.B * std::cos(th); };

    PhaseSolution sol;
    sol.contraction_factor = L;
    if (t == 0 || L == 0) {
        sol.theta = pc.base;
        sol.iterations = 1;
        sol.residual = 0;
        return sol;
    }

    const int cap = 500;
    if (L < 0.9) {
        double th = pc.base;
        for (int it = 1; it <= cap; ++it) {
            double next = rhs(th);
            sol.iterations = it;
            if (std::abs(next - th) <= 0.25 * tol) {
                th = next;
                sol.residual = std::abs(th - rhs(th));
                if (sol.residual <= tol) {
                    sol.theta = th;
                    return sol;
                }
            }
            th = next;
        }
        throw PhaseSolveError("fixed-point phase iteration did not converge", L);
    }

    // Near or beyond the contraction boundary: bisection-safeguarded Newton on
    // g(th) = th - rhs(th), bracketed by [base - L, base + L].
    double lo = pc.base - L, hi = pc.base + L;
    auto g = [&](double th) { return th - rhs(th); };
    double glo = g(lo);
    double th = pc.base;
    for (int it = 1; it <= cap; ++it) {
        sol.iterations = it;
        double gv = g(th);
        if (std::abs(gv) <= tol) {
            sol.theta = th;
            sol.residual = std::abs(gv);
            return sol;
        }
        if ((gv > 0) == (glo > 0)) lo = th; else hi = th;
        double gp = 1.0 + pc.A * std::cos(th) + pc.B * std::sin(th);
        double next = th - gv / gp;
        if (!(next > lo) || !(next < hi) || gp == 0) next = 0.5 * (lo + hi);
        th = next;
    }
    throw PhaseSolveError("phase Newton iteration did not converge", L);
}

Vec2 predict_u(const FieldSpec& spec, Vec2 x, double t, double eps, Frame frame) {
    double phase = frame == Frame::lagrangian ? phase_tilde(spec, x, t, eps)
                                              : solve_theta(spec, x, t, eps).theta;
    Vec2 u = spec.u0.value(x);
    return std::cos(phase) * u - std::sin(phase) * perp(u);
}

double predict_rho(const FieldSpec& spec, Vec2 x, double t, double eps, Frame frame,
                   RhoVariant variant, RhoSign sign) {
    double phase = frame == Frame::lagrangian ? phase_tilde(spec, x, t, eps)
                                              : solve_theta(spec, x, t, eps).theta;
    double b = spec.b.value(x);
    Vec2 glogb = (1.0 / b) * spec.b.gradient(x);
    Vec2 u = spec.u0.value(x);
    double dc = dot(u, glogb), ds = dot(perp(u), glogb);
    double t1, t2;  // coefficients of the u0 and u0perp terms
    if (variant == RhoVariant::theorem_form) {
        t1 = std::cos(phase);
        t2 = std::sin(phase);
    } else {
        t1 = std::sin(phase);
        t2 = std::cos(phase);
    }
    double corr = t * dc * t1 - t * ds * t2;
    if (sign == RhoSign::flipped) corr = -corr;
    return spec.rho0.value(x) * (1.0 + corr);
}

AsymptoticPrediction make_prediction(const FieldSpec& spec, Vec2 x, double t, double eps,
                                     Frame frame, RhoVariant variant, RhoSign sign,
                                     const double* phi_numeric) {
    AsymptoticPrediction p;
    double phi = phi_numeric ? *phi_numeric : eps * phase_tilde(spec, x, t, eps);
    p.X_pred = approx_X(spec, x, t, eps, phi);
    DXJPrediction dj = approx_DX_J(spec, x, t, eps, phi);
    p.DX_pred = dj.DX_pred;
    p.J_pred = dj.J_pred;
    p.u_pred = predict_u(spec, x, t, eps, frame);
    p.rho_pred = predict_rho(spec, x, t, eps, frame, variant, sign);
    p.remainder_order = 2;
    p.phase_used = phi_numeric ? "numeric" : (frame == Frame::lagrangian ? "tilde" : "theta");
    return p;
}

}  // namespace pmhd
