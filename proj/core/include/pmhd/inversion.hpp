#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pmhd/characteristics.hpp"
#include "pmhd/fields.hpp"

namespace pmhd {

struct InversionResult {
    Vec2 preimage;
    int iterations = 0;
    double residual = 0;
    ParticleState state;  // state at time t of the trajectory from the preimage
};

/// Newton inversion of the flow map: find y with |X(t,y) - x_target| <= tol.
/// Initial guess is x_target itself (the preimage lies within O(eps) of it);
/// every Newton step re-integrates the trajectory from the current iterate,
/// with step halving when the residual grows.
/// Throws InversionError on divergence or singular DX.
InversionResult invert_X(const FieldSpec& spec, Vec2 x_target, double t, double eps,
                         const IntegratorConfig& cfg, double tol = 1e-10);

/// Eulerian fields on a grid at one (t, eps), via per-node inversion.
struct EulerianFrame {
    double t = 0;
    double epsilon = 0;
    DomainSample grid;
    std::vector<Vec2> u;
    std::vector<double> rho;
    std::vector<Vec2> preimage;
    std::vector<int> newton_iters;
    std::vector<double> phi;            // phase of the re-integrated trajectory
    std::vector<double> jacobian;       // det DX at the preimage
    std::vector<std::string> node_errors;  // empty string = node converged
    bool partial = false;

    size_t nodes() const { return u.size(); }
    int failed_nodes() const;
};

EulerianFrame eulerian_fields(const FieldSpec& spec, const DomainSample& grid, double t,
                              double eps, const IntegratorConfig& cfg,
                              RhoConvention convention, int workers = 1,
                              double newton_tol = 1e-10);

/// CSV dump, columns: x1,x2,u1,u2,rho,preimage1,preimage2,newton_iters
void write_eulerian_csv(const EulerianFrame& frame, const std::string& path);

}  // namespace pmhd
