#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pmhd/fields.hpp"
#include "pmhd/geometry.hpp"

namespace pmhd {

enum class OdeMethod { rk4, dopri5 };
enum class IntegrationMode { reduced, full };

/// Fixed-step configuration. The oscillation frequency is b/eps, so the step
/// is tied to the phase: h = min(h_max, eps / (eta * b_sup)) advances at most
/// 1/eta radian of phase per step (>= 2*pi*eta steps per period).
struct IntegratorConfig {
    OdeMethod method = OdeMethod::dopri5;
    double eta = 20.0;    // steps per radian of phase
    double h_max = 1e-2;
    double abs_tol = 1e-6;  // accuracy target for cross-validation checks
    double b_sup = 0.0;     // 0 = derive from `domain` grid or from b near the seed
    std::optional<Rect> domain;  // exit check when set
    bool track_density = true;   // carry the direct continuity integration

    double step_size(double eps, double b_sup_effective) const;
};

/// Augmented characteristic state at one time:
/// position X, phase phi = int_0^t b(X), variational matrix DX = dX/dx0,
/// phase gradient Dphi = dphi/dx0, and the velocity recovered from the
/// explicit rotation formula u = u0(x0) cos(phi/eps) - u0perp(x0) sin(phi/eps).
struct ParticleState {
    Vec2 x0;
    double t = 0;
    Vec2 X;
    double phi = 0;
    Mat2 DX = Mat2::identity();
    Vec2 Dphi;
    Vec2 u;
    double rho_direct = 0;  // d rho/dt = -rho d(log J)/dt, when tracked
};

/// Time derivative of the augmented state.
struct StateDerivative {
    Vec2 dX;
    double dphi = 0;
    Mat2 dDX;
    Vec2 dDphi;
};

/// Right-hand side of the reduced system; the DX and Dphi equations are the
/// exact x0-derivatives of the X and phi equations.
StateDerivative rhs_reduced(const ParticleState& state, const FieldSpec& spec, double eps);

struct TrajectoryDiagnostics {
    double max_speed_drift = 0;  // max | |u| - |u0(x0)| |
    double min_jacobian = 1;     // signed min of det DX
    std::optional<double> first_sign_change;  // interpolated t where det DX crosses 0
    long long steps = 0;
};

/// Time-sampled trajectory for one seed.
struct Trajectory {
    Vec2 x0;
    double epsilon = 0;
    IntegrationMode mode = IntegrationMode::reduced;
    std::vector<ParticleState> states;
    TrajectoryDiagnostics diagnostics;
};

/// Integrate from x0 and sample at `out_times` (increasing, first >= 0; the
/// initial condition at t=0 is always the first stored state).
/// `full` mode integrates dX/dt = u, du/dt = -(b(X)/eps) u_perp directly and
/// leaves DX/Dphi/rho at their initial values.
/// Throws DomainExitError if cfg.domain is set and X leaves it.
Trajectory integrate(const FieldSpec& spec, Vec2 x0, double eps,
                     std::span<const double> out_times, const IntegratorConfig& cfg,
                     IntegrationMode mode = IntegrationMode::reduced);

/// Signed determinant of DX. The Jacobian of the flow is its absolute value;
/// the sign change is the caustic certificate.
double jacobian_det(const ParticleState& state);

enum class RhoConvention { conservative, paper_literal };

/// Density along the trajectory: rho0(x0)/J (conservative, the continuity
/// equation) or rho0(x0)*J (paper_literal). Throws CausticError if J <= 0.
std::vector<double> rho_along(const Trajectory& traj, const FieldSpec& spec,
                              RhoConvention convention);

struct CausticDetection {
    std::optional<double> t_eps;  // earliest sign change over the seed set
    Vec2 argmin_seed;
    double min_jacobian = 1;
};

/// Earliest time at which det DX changes sign along any seed trajectory,
/// located on the stored per-step samples (already phase-scale dense) and
/// refined by linear interpolation inside the bracketing step.
CausticDetection detect_caustic(std::span<const Vec2> seeds, const FieldSpec& spec,
                                double eps, const IntegratorConfig& cfg, double t_max);

/// CSV dump, columns: t,X1,X2,phi,DX11,DX12,DX21,DX22,J,u1,u2
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

}  // namespace pmhd
