#include "pmhd/fields.hpp"

#include <cmath>
#include <sstream>

#include "pmhd/errors.hpp"

namespace pmhd {

// --------------------------------------------------------------------- BField

double BField::value(Vec2 x) const {
    switch (family) {
        case BFamily::constant: return b0;
        case BFamily::sinusoidal: return b0 + amplitude * std::sin(dot(wavevector, x));
        case BFamily::gaussian: {
            Vec2 r = x - center;
            return b0 + amplitude * std::exp(-dot(r, r) / (sigma * sigma));
        }
        case BFamily::exponential: return b0 * std::exp(lambda * x.x);
    }
    return b0;
}

Vec2 BField::gradient(Vec2 x) const {
    switch (family) {
        case BFamily::constant: return {0, 0};
        case BFamily::sinusoidal: return amplitude * std::cos(dot(wavevector, x)) * wavevector;
        case BFamily::gaussian: {
            Vec2 r = x - center;
            double g = amplitude * std::exp(-dot(r, r) / (sigma * sigma));
            return (-2.0 / (sigma * sigma)) * g * r;
        }
        case BFamily::exponential: return {lambda * value(x), 0};
    }
    return {0, 0};
}

Mat2 BField::hessian(Vec2 x) const {
    switch (family) {
        case BFamily::constant: return {};
        case BFamily::sinusoidal: {
            double s = -amplitude * std::sin(dot(wavevector, x));
            return s * outer(wavevector, wavevector);
        }
        case BFamily::gaussian: {
            Vec2 r = x - center;
            double s2 = sigma * sigma;
            double g = amplitude * std::exp(-dot(r, r) / s2);
            Mat2 h = (4.0 / (s2 * s2)) * g * outer(r, r);
            h.a11 -= 2.0 * g / s2;
            h.a22 -= 2.0 * g / s2;
            return h;
        }
        case BFamily::exponential: return {lambda * lambda * value(x), 0, 0, 0};
    }
    return {};
}

// -------------------------------------------------------------------- U0Field

Vec2 U0Field::value(Vec2 x) const {
    switch (family) {
        case U0Family::constant: return vector;
        case U0Family::rigid_rotation: return omega * perp(x);
        case U0Family::gaussian_modulated: {
            Vec2 r = x - center;
            return std::exp(-dot(r, r) / (sigma * sigma)) * vector;
        }
    }
    return vector;
}

Mat2 U0Field::jacobian(Vec2 x) const {
    switch (family) {
        case U0Family::constant: return {};
        case U0Family::rigid_rotation: return {0, omega, -omega, 0};
        case U0Family::gaussian_modulated: {
            Vec2 r = x - center;
            double env = std::exp(-dot(r, r) / (sigma * sigma));
            return outer(vector, (-2.0 * env / (sigma * sigma)) * r);
        }
    }
    return {};
}

// ------------------------------------------------------------------ Rho0Field

double Rho0Field::value(Vec2 x) const {
    switch (family) {
        case Rho0Family::constant: return base;
        case Rho0Family::gaussian: {
            Vec2 r = x - center;
            return base + amplitude * std::exp(-dot(r, r) / (sigma * sigma));
        }
        case Rho0Family::sinusoidal: return base + amplitude * std::sin(dot(wavevector, x));
    }
    return base;
}

Vec2 Rho0Field::gradient(Vec2 x) const {
    switch (family) {
        case Rho0Family::constant: return {0, 0};
        case Rho0Family::gaussian: {
            Vec2 r = x - center;
            double g = amplitude * std::exp(-dot(r, r) / (sigma * sigma));
            return (-2.0 / (sigma * sigma)) * g * r;
        }
        case Rho0Family::sinusoidal:
            return amplitude * std::cos(dot(wavevector, x)) * wavevector;
    }
    return {0, 0};
}

// ------------------------------------------------------------------ FieldSpec

void FieldSpec::validate() const {
    switch (b.family) {
        case BFamily::constant:
            if (!(b.b0 > 0)) throw ConfigError("constant b requires b0 > 0");
            break;
        case BFamily::sinusoidal:
            if (!(b.b0 - std::abs(b.amplitude) > 0))
                throw ConfigError("sinusoidal b requires b0 - |amplitude| > 0");
            break;
        case BFamily::gaussian:
            // a negative dip may still violate (H1); check_hypotheses catches
            // that on the working domain with the offending grid point
            if (!(b.sigma > 0)) throw ConfigError("gaussian b requires sigma > 0");
            if (!(b.b0 > 0)) throw ConfigError("gaussian b requires b0 > 0");
            break;
        case BFamily::exponential:
            if (!(b.b0 > 0)) throw ConfigError("exponential b requires b0 > 0");
            if (!(b.window_hi > b.window_lo))
                throw ConfigError("exponential b requires a non-degenerate x1 window");
            break;
    }
    if (u0.family == U0Family::gaussian_modulated && !(u0.sigma > 0))
        throw ConfigError("modulated u0 requires sigma > 0");
    switch (rho0.family) {
        case Rho0Family::constant:
            if (rho0.base < 0) throw ConfigError("rho0 must be nonnegative");
            break;
        case Rho0Family::gaussian:
            if (!(rho0.sigma > 0)) throw ConfigError("gaussian rho0 requires sigma > 0");
            if (rho0.base + std::min(0.0, rho0.amplitude) < 0)
                throw ConfigError("gaussian rho0 must be nonnegative");
            break;
        case Rho0Family::sinusoidal:
            if (rho0.base - std::abs(rho0.amplitude) < 0)
                throw ConfigError("sinusoidal rho0 must be nonnegative");
            break;
    }
}

FieldEval eval_fields(const FieldSpec& spec, Vec2 x) {
    spec.validate();
    return {spec.b.value(x),    spec.b.gradient(x),    spec.b.hessian(x),
            spec.u0.value(x),   spec.u0.jacobian(x),
            spec.rho0.value(x), spec.rho0.gradient(x)};
}

Vec2 drift_velocity(const FieldSpec& spec, Vec2 x) {
    double b = spec.b.value(x);
    Vec2 gb = spec.b.gradient(x);
    Vec2 u = spec.u0.value(x);
    Vec2 up = perp(u);
    return (1.0 / (2.0 * b * b)) * (dot(up, gb) * u - dot(u, gb) * up);
}

// --------------------------------------------------------------- DomainSample

void DomainSample::validate() const {
    if (!rect.valid()) throw ConfigError("domain rectangle is degenerate");
    if (resolution < 2) throw ConfigError("domain resolution must be >= 2");
}

std::vector<Vec2> DomainSample::nodes() const {
    validate();
    std::vector<Vec2> out;
    out.reserve(static_cast<size_t>(resolution) * resolution);
    double dx = (rect.hi.x - rect.lo.x) / (resolution - 1);
    double dy = (rect.hi.y - rect.lo.y) / (resolution - 1);
    for (int j = 0; j < resolution; ++j)
        for (int i = 0; i < resolution; ++i)
            out.push_back({rect.lo.x + i * dx, rect.lo.y + j * dy});
    return out;
}

// ----------------------------------------------------------------- hypotheses

double t_star_from(double u0_sup, double grad_b_sup) {
    double denom = u0_sup * grad_b_sup;
    if (denom > 0) return 1.0 / denom;
    return std::numeric_limits<double>::infinity();
}

HypothesisReport check_hypotheses(const FieldSpec& spec, const DomainSample& domain) {
    spec.validate();
    HypothesisReport r;
    r.b_min = std::numeric_limits<double>::infinity();
    Vec2 argmin{};
    for (Vec2 p : domain.nodes()) {
        FieldEval f = eval_fields(spec, p);
        if (f.b < r.b_min) { r.b_min = f.b; argmin = p; }
        r.b_sup = std::max(r.b_sup, f.b);
        r.grad_b_sup = std::max(r.grad_b_sup, norm(f.grad_b));
        r.hess_b_sup = std::max(r.hess_b_sup, norm_op(f.hess_b));
        r.u0_sup = std::max(r.u0_sup, norm(f.u0));
        r.grad_u0_sup = std::max(r.grad_u0_sup, norm_op(f.jac_u0));
    }
    if (!(r.b_min > 0)) {
        std::ostringstream msg;
        msg << "hypothesis violated: b(" << argmin.x << ", " << argmin.y
            << ") = " << r.b_min << " <= 0";
        throw HypothesisError(msg.str(), argmin);
    }
    r.t_star = t_star_from(r.u0_sup, r.grad_b_sup);
    return r;
}

HypothesisReport hypothesis_envelope(const FieldSpec& spec, const Rect& rect) {
    spec.validate();
    HypothesisReport r;
    const BField& b = spec.b;
    switch (b.family) {
        case BFamily::constant:
            r.b_min = r.b_sup = b.b0;
            break;
        case BFamily::sinusoidal: {
            double a = std::abs(b.amplitude);
            double k = norm(b.wavevector);
            r.b_min = b.b0 - a;
            r.b_sup = b.b0 + a;
            r.grad_b_sup = a * k;
            r.hess_b_sup = a * k * k;
            break;
        }
        case BFamily::gaussian: {
            double a = b.amplitude;
            r.b_min = b.b0 + std::min(0.0, a);
            r.b_sup = b.b0 + std::max(0.0, a);
            // max of 2r/s^2 exp(-r^2/s^2) at r = s/sqrt(2); Hessian bound at r^2 = s^2/2
            double s = b.sigma;
            r.grad_b_sup = std::abs(a) * std::sqrt(2.0 / std::exp(1.0)) / s;
            r.hess_b_sup = std::abs(a) * 4.0 * std::exp(-0.5) / (s * s);
            break;
        }
        case BFamily::exponential: {
            double lo = b.b0 * std::exp(b.lambda * b.window_lo);
            double hi = b.b0 * std::exp(b.lambda * b.window_hi);
            r.b_min = std::min(lo, hi);
            r.b_sup = std::max(lo, hi);
            r.grad_b_sup = std::abs(b.lambda) * r.b_sup;
            r.hess_b_sup = b.lambda * b.lambda * r.b_sup;
            break;
        }
    }
    const U0Field& u = spec.u0;
    switch (u.family) {
        case U0Family::constant:
            r.u0_sup = norm(u.vector);
            r.grad_u0_sup = 0;
            break;
        case U0Family::rigid_rotation: {
            double rmax = 0;
            for (Vec2 c : {rect.lo, rect.hi, Vec2{rect.lo.x, rect.hi.y}, Vec2{rect.hi.x, rect.lo.y}})
                rmax = std::max(rmax, norm(c));
            r.u0_sup = std::abs(u.omega) * rmax;
            r.grad_u0_sup = std::abs(u.omega);
            break;
        }
        case U0Family::gaussian_modulated:
            r.u0_sup = norm(u.vector);
            r.grad_u0_sup = norm(u.vector) * std::sqrt(2.0 / std::exp(1.0)) / u.sigma;
            break;
    }
    r.t_star = t_star_from(r.u0_sup, r.grad_b_sup);
    return r;
}

}  // namespace pmhd
