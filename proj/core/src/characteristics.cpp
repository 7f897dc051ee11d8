#include "pmhd/characteristics.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pmhd/errors.hpp"
#include "pmhd/format.hpp"

namespace pmhd {

namespace {

// State layout, reduced mode: X(2) phi(1) DX(4, row-major) Dphi(2) rho(1).
// Full mode: X(2) u(2) phi(1).
constexpr int kReducedDim = 10;
constexpr int kFullDim = 5;
using StateVec = std::array<double, kReducedDim>;

struct SeedData {
    Vec2 u0;
    Vec2 u0p;
    Mat2 du0;
    Mat2 du0p;
    double rho0;
};

void rhs_reduced_packed(const StateVec& y, const FieldSpec& spec, const SeedData& sd,
                        double eps, bool track_density, StateVec& dy) {
    Vec2 X{y[0], y[1]};
    double c = std::cos(y[2] / eps);
    double s = std::sin(y[2] / eps);
    double b = spec.b.value(X);
    Vec2 gb = spec.b.gradient(X);

    Vec2 dX = c * sd.u0 - s * sd.u0p;
    dy[0] = dX.x;
    dy[1] = dX.y;
    dy[2] = b;

    Mat2 DX{y[3], y[4], y[5], y[6]};
    Vec2 Dphi{y[7], y[8]};
    Mat2 dDX = c * sd.du0 - s * sd.du0p - (1.0 / eps) * outer(s * sd.u0 + c * sd.u0p, Dphi);
    dy[3] = dDX.a11;
    dy[4] = dDX.a12;
    dy[5] = dDX.a21;
    dy[6] = dDX.a22;

    Vec2 dDphi = transpose(DX) * gb;
    dy[7] = dDphi.x;
    dy[8] = dDphi.y;

    if (track_density) {
        // d rho/dt = -rho d(log J)/dt with dJ/dt = tr(adj(DX) dDX/dt)
        double J = det(DX);
        double dJ = DX.a22 * dDX.a11 - DX.a12 * dDX.a21 - DX.a21 * dDX.a12 + DX.a11 * dDX.a22;
        dy[9] = -y[9] * dJ / J;
    } else {
        dy[9] = 0;
    }
}

void rhs_full_packed(const StateVec& y, const FieldSpec& spec, double eps, StateVec& dy) {
    Vec2 X{y[0], y[1]};
    Vec2 u{y[2], y[3]};
    double b = spec.b.value(X);
    dy[0] = u.x;
    dy[1] = u.y;
    Vec2 du = (-b / eps) * perp(u);
    dy[2] = du.x;
    dy[3] = du.y;
    dy[4] = b;
}

class Stepper {
  public:
    Stepper(const FieldSpec& spec, const SeedData& sd, double eps, bool track_density,
            IntegrationMode mode, OdeMethod method, int dim)
        : spec_(spec), sd_(sd), eps_(eps), track_density_(track_density), mode_(mode),
          method_(method), dim_(dim) {}

    void eval(const StateVec& y, StateVec& dy) const {
        if (mode_ == IntegrationMode::reduced)
            rhs_reduced_packed(y, spec_, sd_, eps_, track_density_, dy);
        else
            rhs_full_packed(y, spec_, eps_, dy);
    }

    void step(StateVec& y, double h) const {
        if (method_ == OdeMethod::rk4)
            step_rk4(y, h);
        else
            step_dopri5(y, h);
    }

  private:
    void step_rk4(StateVec& y, double h) const {
        StateVec k1, k2, k3, k4, tmp;
        eval(y, k1);
        axpy(tmp, y, 0.5 * h, k1);
        eval(tmp, k2);
        axpy(tmp, y, 0.5 * h, k2);
        eval(tmp, k3);
        axpy(tmp, y, h, k3);
        eval(tmp, k4);
        for (int i = 0; i < dim_; ++i)
            y[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }

    // Dormand-Prince coefficients, fifth-order weights, fixed step.
    void step_dopri5(StateVec& y, double h) const {
        static constexpr double a21 = 1.0 / 5.0;
        static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
        static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
        static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                                a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
        static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                                a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                                a65 = -5103.0 / 18656.0;
        static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                                b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;

        StateVec k1, k2, k3, k4, k5, k6, tmp;
        eval(y, k1);
        comb(tmp, y, h, {{a21, &k1}});
        eval(tmp, k2);
        comb(tmp, y, h, {{a31, &k1}, {a32, &k2}});
        eval(tmp, k3);
        comb(tmp, y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
        eval(tmp, k4);
        comb(tmp, y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
        eval(tmp, k5);
        comb(tmp, y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
        eval(tmp, k6);
        for (int i = 0; i < dim_; ++i)
            y[i] += h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    }

    void axpy(StateVec& out, const StateVec& y, double c, const StateVec& k) const {
        for (int i = 0; i < dim_; ++i) out[i] = y[i] + c * k[i];
    }

    void comb(StateVec& out, const StateVec& y, double h,
              std::initializer_list<std::pair<double, const StateVec*>> terms) const {
        for (int i = 0; i < dim_; ++i) {
            double acc = 0;
            for (const auto& [c, k] : terms) acc += c * (*k)[i];
            out[i] = y[i] + h * acc;
        }
    }

    const FieldSpec& spec_;
    const SeedData& sd_;
    double eps_;
    bool track_density_;
    IntegrationMode mode_;
    OdeMethod method_;
    int dim_;
};

ParticleState unpack(const StateVec& y, double t, Vec2 x0, const SeedData& sd, double eps,
                     IntegrationMode mode) {
    ParticleState st;
    st.x0 = x0;
    st.t = t;
    st.X = {y[0], y[1]};
    if (mode == IntegrationMode::reduced) {
        st.phi = y[2];
        st.DX = {y[3], y[4], y[5], y[6]};
        st.Dphi = {y[7], y[8]};
        double c = std::cos(st.phi / eps);
        double s = std::sin(st.phi / eps);
        st.u = c * sd.u0 - s * sd.u0p;
        st.rho_direct = y[9];
    } else {
        st.u = {y[2], y[3]};
        st.phi = y[4];
        st.DX = Mat2::identity();
        st.Dphi = {0, 0};
        st.rho_direct = sd.rho0;
    }
    return st;
}

}  // namespace

double IntegratorConfig::step_size(double eps, double b_sup_effective) const {
    return std::min(h_max, eps / (eta * b_sup_effective));
}

StateDerivative rhs_reduced(const ParticleState& state, const FieldSpec& spec, double eps) {
    SeedData sd;
    sd.u0 = spec.u0.value(state.x0);
    sd.u0p = perp(sd.u0);
    sd.du0 = spec.u0.jacobian(state.x0);
    sd.du0p = Mat2{0, 1, -1, 0} * sd.du0;
    StateVec y{state.X.x, state.X.y, state.phi,
               state.DX.a11, state.DX.a12, state.DX.a21, state.DX.a22,
               state.Dphi.x, state.Dphi.y, 1.0};
    StateVec dy{};
    rhs_reduced_packed(y, spec, sd, eps, false, dy);
    return {{dy[0], dy[1]}, dy[2], {dy[3], dy[4], dy[5], dy[6]}, {dy[7], dy[8]}};
}

Trajectory integrate(const FieldSpec& spec, Vec2 x0, double eps,
                     std::span<const double> out_times, const IntegratorConfig& cfg,
                     IntegrationMode mode) {
    spec.validate();
    if (eps <= 0) throw ConfigError("epsilon must be positive");
    if (out_times.empty()) throw ConfigError("integrate: no output times");
    for (size_t i = 0; i < out_times.size(); ++i) {
        if (out_times[i] < 0) throw ConfigError("integrate: negative output time");
        if (i > 0 && out_times[i] <= out_times[i - 1])
            throw ConfigError("integrate: output times must be strictly increasing");
    }

    SeedData sd;
    sd.u0 = spec.u0.value(x0);
    sd.u0p = perp(sd.u0);
    sd.du0 = spec.u0.jacobian(x0);
    sd.du0p = Mat2{0, 1, -1, 0} * sd.du0;
    sd.rho0 = spec.rho0.value(x0);

    double b_sup = cfg.b_sup;
    if (b_sup <= 0) {
        if (cfg.domain) {
            DomainSample probe{*cfg.domain, 33};
            b_sup = 0;
            for (Vec2 p : probe.nodes()) b_sup = std::max(b_sup, spec.b.value(p));
        } else {
            // trajectories stay within O(eps) of the seed; 1.5x local value is safe
            b_sup = 1.5 * spec.b.value(x0);
        }
    }

    Trajectory traj;
    traj.x0 = x0;
    traj.epsilon = eps;
    traj.mode = mode;
    traj.diagnostics.min_jacobian = 1.0;

    const int dim = mode == IntegrationMode::reduced ? kReducedDim : kFullDim;
    Stepper stepper(spec, sd, eps, cfg.track_density, mode, cfg.method, dim);

    StateVec y{};
    y[0] = x0.x;
    y[1] = x0.y;
    if (mode == IntegrationMode::reduced) {
        y[3] = 1.0;  // DX = Id
        y[6] = 1.0;
        y[9] = sd.rho0;
    } else {
        y[2] = sd.u0.x;
        y[3] = sd.u0.y;
    }

    const double h0 = cfg.step_size(eps, b_sup);
    const double speed0 = norm(sd.u0);

    double t = 0;
    size_t next_out = 0;
    if (out_times[0] == 0.0) {
        traj.states.push_back(unpack(y, 0.0, x0, sd, eps, mode));
        ++next_out;
    }
    double prev_J = 1.0;
    double prev_t = 0.0;

    while (next_out < out_times.size()) {
        double target = out_times[next_out];
        double h = std::min(h0, target - t);
        stepper.step(y, h);
        t += h;
        traj.diagnostics.steps++;

        if (cfg.domain && !cfg.domain->contains({y[0], y[1]})) {
            std::ostringstream msg;
            msg << "trajectory left the domain at t = " << t;
            throw DomainExitError(msg.str(), t);
        }
        if (mode == IntegrationMode::reduced) {
            double J = y[3] * y[6] - y[4] * y[5];
            traj.diagnostics.min_jacobian = std::min(traj.diagnostics.min_jacobian, J);
            if (!traj.diagnostics.first_sign_change && prev_J > 0 && J <= 0) {
                double tc = (J == prev_J) ? t
                                          : prev_t + (t - prev_t) * prev_J / (prev_J - J);
                traj.diagnostics.first_sign_change = tc;
            }
            prev_J = J;
            prev_t = t;
        } else {
            double speed = std::hypot(y[2], y[3]);
            traj.diagnostics.max_speed_drift =
                std::max(traj.diagnostics.max_speed_drift, std::abs(speed - speed0));
        }

        if (t >= target - 1e-15 * std::max(1.0, target)) {
            traj.states.push_back(unpack(y, target, x0, sd, eps, mode));
            ++next_out;
        }
    }
    return traj;
}

double jacobian_det(const ParticleState& state) { return det(state.DX); }

std::vector<double> rho_along(const Trajectory& traj, const FieldSpec& spec,
                              RhoConvention convention) {
    double rho0 = spec.rho0.value(traj.x0);
    std::vector<double> out;
    out.reserve(traj.states.size());
    for (const ParticleState& st : traj.states) {
        double J = det(st.DX);
        if (J <= 0)
            throw CausticError("Jacobian lost positivity along the trajectory", st.t);
        out.push_back(convention == RhoConvention::conservative ? rho0 / J : rho0 * J);
    }
    return out;
}

CausticDetection detect_caustic(std::span<const Vec2> seeds, const FieldSpec& spec,
                                double eps, const IntegratorConfig& cfg, double t_max) {
    CausticDetection result;
    IntegratorConfig c = cfg;
    c.track_density = false;  // d rho/dt ~ 1/J is singular across the crossing
    const std::array<double, 1> out{t_max};
    for (Vec2 seed : seeds) {
        Trajectory traj = integrate(spec, seed, eps, out, c);
        if (traj.diagnostics.min_jacobian < result.min_jacobian) {
            result.min_jacobian = traj.diagnostics.min_jacobian;
            if (!traj.diagnostics.first_sign_change) result.argmin_seed = seed;
        }
        if (traj.diagnostics.first_sign_change) {
            double tc = *traj.diagnostics.first_sign_change;
            if (!result.t_eps || tc < *result.t_eps) {
                result.t_eps = tc;
                result.argmin_seed = seed;
            }
        }
    }
    return result;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << "t,X1,X2,phi,DX11,DX12,DX21,DX22,J,u1,u2\n";
    for (const ParticleState& st : traj.states) {
        f << fmt_double(st.t) << ',' << fmt_double(st.X.x) << ',' << fmt_double(st.X.y) << ','
          << fmt_double(st.phi) << ',' << fmt_double(st.DX.a11) << ',' << fmt_double(st.DX.a12)
          << ',' << fmt_double(st.DX.a21) << ',' << fmt_double(st.DX.a22) << ','
          << fmt_double(det(st.DX)) << ',' << fmt_double(st.u.x) << ',' << fmt_double(st.u.y)
          << '\n';
    }
    if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace pmhd
