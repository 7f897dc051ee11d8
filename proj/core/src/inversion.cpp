#include "pmhd/inversion.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pmhd/errors.hpp"
#include "pmhd/format.hpp"
#include "pmhd/parallel.hpp"

namespace pmhd {

namespace {

ParticleState final_state(const FieldSpec& spec, Vec2 y, double t, double eps,
                          const IntegratorConfig& cfg) {
    if (t == 0) {
        ParticleState st;
        st.x0 = y;
        st.X = y;
        st.u = spec.u0.value(y);
        st.rho_direct = spec.rho0.value(y);
        return st;
    }
    const std::array<double, 1> out{t};
    return integrate(spec, y, eps, out, cfg).states.back();
}

}  // namespace

InversionResult invert_X(const FieldSpec& spec, Vec2 x_target, double t, double eps,
                         const IntegratorConfig& cfg, double tol) {
    IntegratorConfig c = cfg;
    c.track_density = false;

    InversionResult res;
    res.preimage = x_target;
    res.state = final_state(spec, x_target, t, eps, c);
    Vec2 r = res.state.X - x_target;
    double rn = norm(r);

    const int cap = 30;
    for (int it = 1; it <= cap; ++it) {
        res.iterations = it;
        if (rn <= tol) {
            res.residual = rn;
            return res;
        }
        Mat2 DX = res.state.DX;
        if (std::abs(det(DX)) < 1e-12)
            throw InversionError("singular DX during Newton inversion (near caustic?)");
        Vec2 delta = solve(DX, r);

        // step damping: halve until the residual decreases
        double lambda = 1.0;
        for (int halving = 0; halving < 8; ++halving) {
            Vec2 y_try = res.preimage - lambda * delta;
            ParticleState st_try = final_state(spec, y_try, t, eps, c);
            double rn_try = norm(st_try.X - x_target);
            if (rn_try < rn || rn_try <= tol) {
                res.preimage = y_try;
                res.state = st_try;
                r = st_try.X - x_target;
                rn = rn_try;
                break;
            }
            lambda *= 0.5;
            if (halving == 7)
                throw InversionError("Newton inversion stalled (residual not decreasing)");
        }
    }
    if (rn <= tol) {
        res.residual = rn;
        return res;
    }
    throw InversionError("Newton inversion did not converge within the iteration cap");
}

int EulerianFrame::failed_nodes() const {
    int n = 0;
    for (const auto& e : node_errors)
        if (!e.empty()) ++n;
    return n;
}

EulerianFrame eulerian_fields(const FieldSpec& spec, const DomainSample& grid, double t,
                              double eps, const IntegratorConfig& cfg,
                              RhoConvention convention, int workers, double newton_tol) {
    EulerianFrame frame;
    frame.t = t;
    frame.epsilon = eps;
    frame.grid = grid;
    std::vector<Vec2> nodes = grid.nodes();
    size_t n = nodes.size();
    frame.u.assign(n, Vec2{});
    frame.rho.assign(n, 0.0);
    frame.preimage.assign(n, Vec2{});
    frame.newton_iters.assign(n, 0);
    frame.phi.assign(n, 0.0);
    frame.jacobian.assign(n, 0.0);
    frame.node_errors.assign(n, std::string{});

    parallel_for(n, workers, [&](size_t i) {
        Vec2 x = nodes[i];
        try {
            InversionResult inv = invert_X(spec, x, t, eps, cfg, newton_tol);
            const ParticleState& st = inv.state;
            Vec2 y = inv.preimage;
            frame.preimage[i] = y;
            frame.newton_iters[i] = inv.iterations;
            frame.phi[i] = st.phi;
            double J = det(st.DX);
            frame.jacobian[i] = J;
            frame.u[i] = st.u;  // u0(y) rotated by phi(t,y)/eps
            double rho0 = spec.rho0.value(y);
            frame.rho[i] = convention == RhoConvention::conservative ? rho0 / J : rho0 * J;
        } catch (const std::exception& e) {
            frame.node_errors[i] = e.what();
        }
    });
    frame.partial = frame.failed_nodes() > 0;
    return frame;
}

void write_eulerian_csv(const EulerianFrame& frame, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << "x1,x2,u1,u2,rho,preimage1,preimage2,newton_iters\n";
    std::vector<Vec2> nodes = frame.grid.nodes();
    for (size_t i = 0; i < frame.nodes(); ++i) {
        f << fmt_double(nodes[i].x) << ',' << fmt_double(nodes[i].y) << ','
          << fmt_double(frame.u[i].x) << ',' << fmt_double(frame.u[i].y) << ','
          << fmt_double(frame.rho[i]) << ',' << fmt_double(frame.preimage[i].x) << ','
          << fmt_double(frame.preimage[i].y) << ',' << frame.newton_iters[i] << '\n';
    }
    if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace pmhd
