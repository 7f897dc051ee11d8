// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are pinned here, not configurable.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "pmhd/asymptotics.hpp"
#include "pmhd/characteristics.hpp"
#include "pmhd/config.hpp"
#include "pmhd/inversion.hpp"
#include "pmhd/report.hpp"
#include "pmhd/sweep.hpp"

using namespace pmhd;

namespace {

int failures = 0;

void report(int id, const char* label, bool pass, const std::string& detail) {
    std::printf("%s criterion %2d: %-28s %s\n", pass ? "PASS" : "FAIL", id, label,
                detail.c_str());
    if (!pass) failures++;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

ExperimentConfig sinusoidal_config() {
    return load_config(std::string(PMHD_SOURCE_DIR) + "/configs/sinusoidal.json");
}

FieldSpec caustic_field() {
    FieldSpec s;
    s.b.family = BFamily::exponential;
    s.b.b0 = 2.0;
    s.b.lambda = 1.0;
    s.b.window_lo = -0.6;
    s.b.window_hi = 0.6;
    s.u0.vector = {1, 0};  // |u0| = 1, so |u0| |grad log b| = 1
    return s;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------

void criterion_1_constant_b_exactness() {
    auto t0 = std::chrono::steady_clock::now();
    const double b0 = 2.0, eps = 1e-2, T = 1.0;
    const Vec2 x0{0.3, -0.2}, u0{1, 0};
    FieldSpec s;
    s.b.b0 = b0;
    s.u0.vector = u0;
    IntegratorConfig cfg;
    Trajectory traj = integrate(s, x0, eps, linspace(T / 100, T, 100), cfg);
    double max_err = 0;
    for (const ParticleState& st : traj.states) {
        double th = b0 * st.t / eps;
        Vec2 exact = x0 + (eps / b0) * std::sin(th) * u0 -
                     (eps / b0) * (1.0 - std::cos(th)) * perp(u0);
        max_err = std::max(max_err, norm(st.X - exact));
    }
    double secs = seconds_since(t0);
    report(1, "constant-b exactness", max_err <= 1e-7 && secs < 1.0,
           "max err " + fmt(max_err) + " (<=1e-7), " + fmt(secs) + " s (<1)");
}

void criterion_2_speed_conservation() {
    auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg = sinusoidal_config();
    const double eps = 1e-2, T = 1.0;
    std::vector<Vec2> seeds = cfg.seeds.materialize(cfg.domain.rect);  // 16 x 16
    IntegratorConfig icfg = cfg.integrator;
    icfg.b_sup = 2.5;
    std::vector<double> times = linspace(0, T, 33);
    double worst = 0;
    for (Vec2 seed : seeds) {
        Trajectory traj = integrate(cfg.fields, seed, eps, times, icfg);
        double speed0 = norm(cfg.fields.u0.value(seed));
        for (const ParticleState& st : traj.states)
            worst = std::max(worst, std::abs(norm(st.u) - speed0));
    }
    double secs = seconds_since(t0);
    report(2, "speed conservation", worst <= 1e-7 && secs < 30.0,
           "max drift " + fmt(worst) + " (<=1e-7) over 256 seeds, " + fmt(secs) + " s (<30)");
}

void criteria_3_4_5_8_sweep() {
    auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig cfg = sinusoidal_config();
    cfg.workers = 2;
    SweepReport rep = run_sweep(cfg);
    double secs = seconds_since(t0);

    // 3: confinement bound at every sample + stability of max|X-x|/eps
    {
        bool margins = true;
        for (const BoundCheck& b : rep.bounds)
            if (b.name == "confinement_ball" && !b.pass) margins = false;
        const ClaimTable* conf = nullptr;
        for (const ClaimTable& c : rep.claims)
            if (c.name == "confinement") conf = &c;
        double lo = 1e300, hi = 0;
        for (double v : conf->errors) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        bool stable = hi < 2.0 * lo;
        report(3, "confinement O(eps)", margins && stable,
               "margins>=0: " + std::string(margins ? "yes" : "no") + ", max|X-x|/eps in [" +
                   fmt(lo) + ", " + fmt(hi) + "] (ratio<2)");
    }

    // 4: trajectory expansion slope ~ 2
    {
        const ClaimTable* c = nullptr;
        for (const ClaimTable& t : rep.claims)
            if (t.name == "trajectory_expansion") c = &t;
        report(4, "trajectory order eps^2",
               c->fit.slope >= 1.7 && c->fit.slope <= 2.3 && secs < 600.0,
               "slope " + fmt(c->fit.slope) + " in [1.7,2.3], sweep " + fmt(secs) + " s (<600)");
    }

    // 5: first-order claims + Eulerian Newton convergence
    {
        std::ostringstream detail;
        bool ok = true;
        for (const char* name : {"flow_gradient_expansion", "velocity_lagrangian",
                                 "density_lagrangian", "velocity_eulerian", "density_eulerian"}) {
            const ClaimTable* c = nullptr;
            for (const ClaimTable& t : rep.claims)
                if (t.name == name) c = &t;
            bool in = c->fit.slope >= 0.8 && c->fit.slope <= 1.2;
            ok &= in;
            detail << name << " " << fmt(c->fit.slope) << (in ? " " : "(!) ");
        }
        bool newton = true;
        for (const InversionCheck& ic : rep.inversion) newton &= ic.pass;
        ok &= newton;
        detail << (newton ? "| 100% Newton convergence" : "| Newton failures");
        report(5, "first-order claims", ok, detail.str());
    }

    // 8: density adjudication
    {
        bool ok = true;
        std::ostringstream detail;
        for (const DensityAdjudication& adj : rep.density) {
            ok &= adj.direct_vs_conservative <= 1e-6;
            ok &= adj.winner_pass;
            const DensityCombo& w = adj.combos[adj.winner];
            // the losing trig variant must sit on a visible O(t) floor
            ok &= adj.loser_floor > 5.0 * w.errors.back();
            ok &= adj.loser_flatness < 3.0;
            detail << (adj.frame == Frame::lagrangian ? "lagrangian" : "eulerian") << " winner "
                   << (w.variant == RhoVariant::theorem_form ? "theorem_form" : "prop_form")
                   << "/" << (w.sign == RhoSign::paper ? "paper" : "flipped") << " slope "
                   << fmt(w.fit.slope) << ", loser floor " << fmt(adj.loser_floor) << "; ";
        }
        const DensityAdjudication& L = rep.density.front();
        detail << "direct-vs-rho0/J " << fmt(L.direct_vs_conservative) << " (<=1e-6)";
        report(8, "density adjudication", ok, detail.str());
    }
}

void criterion_6_nsp() {
    NspSuiteParams p;  // 100 samples x {1e-1, 1e-2, 1e-3}
    NspSuiteResult res = run_nsp_suite(p);
    report(6, "non-stationary phase bound", res.pass,
           "min margin " + fmt(res.min_margin) + " over " +
               std::to_string(res.cases.size()) + " cases (>= -1e-12)");
}

void criterion_7_lifespan_and_caustic() {
    // (a) J stays away from 0 below the lifespan bound: T = 0.9 t_star
    ExperimentConfig cfg = sinusoidal_config();
    double t_star = hypothesis_envelope(cfg.fields, cfg.domain.rect).t_star;  // = 2
    IntegratorConfig icfg = cfg.integrator;
    icfg.b_sup = 2.5;
    std::vector<Vec2> seeds = cfg.seeds.materialize(cfg.domain.rect);
    std::vector<double> times = linspace(0, 0.9 * t_star, 65);
    double minJ = 1.0;
    for (size_t i = 0; i < seeds.size(); i += 1) {
        for (double eps : {0.0125, 0.00625}) {
            Trajectory traj = integrate(cfg.fields, seeds[i], eps, times, icfg);
            minJ = std::min(minJ, traj.diagnostics.min_jacobian);
        }
    }
    bool lifespan_ok = minJ > 0.05;

    // (b) caustic family: detected crossing within 10% of 1/(|u0| |grad log b|)
    FieldSpec cf = caustic_field();
    IntegratorConfig ccfg;
    ccfg.b_sup = 2.0 * std::exp(0.6);
    const std::array<Vec2, 3> cseeds{Vec2{0, 0}, Vec2{0.1, -0.1}, Vec2{-0.1, 0.1}};
    CausticDetection det = detect_caustic(cseeds, cf, 1e-3, ccfg, 1.3);
    bool caustic_ok = det.t_eps.has_value() && std::abs(*det.t_eps - 1.0) <= 0.1;
    report(7, "lifespan and caustic", lifespan_ok && caustic_ok,
           "min J " + fmt(minJ) + " (>0.05) at T=0.9 t_star; crossing at t=" +
               (det.t_eps ? fmt(*det.t_eps) : std::string("none")) + " (pred 1, +-10%)");
}

void criterion_9_determinism() {
    ExperimentConfig cfg = sinusoidal_config();
    cfg.eps_list = {0.1, 0.05, 0.025};  // trimmed sweep; determinism is scale-free
    cfg.seeds.grid_nx = 4;
    cfg.seeds.grid_ny = 4;
    cfg.output_times = 9;
    cfg.density.output_times = 9;
    cfg.eulerian.grid_resolution = 3;

    cfg.workers = 2;
    SweepReport r1 = run_sweep(cfg);
    SweepReport r2 = run_sweep(cfg);
    bool rerun_identical = report_to_json(r1) == report_to_json(r2);

    ExperimentConfig serial = cfg;
    serial.workers = 1;
    SweepReport r3 = run_sweep(serial);
    r3.workers = r1.workers;  // declared worker count is metadata, not a result
    std::string d1 = "acc9_par", d3 = "acc9_ser";
    emit_report(r1, {ReportFormat::csv, ReportFormat::markdown}, d1);
    emit_report(r3, {ReportFormat::csv, ReportFormat::markdown}, d3);
    bool parallel_identical = true;
    for (const char* f : {"/errors.csv", "/slopes.csv", "/bounds.csv", "/density.csv",
                          "/inversion.csv", "/summary.md"})
        parallel_identical &= slurp(d1 + f) == slurp(d3 + f);
    std::filesystem::remove_all(d1);
    std::filesystem::remove_all(d3);
    report(9, "determinism", rerun_identical && parallel_identical,
           std::string("rerun byte-identical: ") + (rerun_identical ? "yes" : "no") +
               ", 1-vs-2 workers identical: " + (parallel_identical ? "yes" : "no"));
}

void criterion_10_theta_solver() {
    FieldSpec s = caustic_field();
    s.u0.vector = {0.7, 0.4};
    std::mt19937_64 rng(321);
    std::uniform_real_distribution<double> ux(-0.4, 0.4);
    std::uniform_real_distribution<double> ut(0.02, 0.85);
    std::uniform_real_distribution<double> ue(std::log(3e-3), std::log(1e-1));

    auto bisect = [](double A, double B, double base) {
        auto g = [&](double th) { return th - (base - A * std::sin(th) + B * std::cos(th)); };
        double L = std::abs(A) + std::abs(B);
        double lo = base - L, hi = base + L;
        for (int i = 0; i < 200; ++i) {
            double mid = 0.5 * (lo + hi);
            if (g(mid) <= 0) lo = mid;
            else hi = mid;
        }
        return 0.5 * (lo + hi);
    };

    int tested = 0;
    double max_dev = 0, max_res = 0;
    while (tested < 1000) {
        Vec2 x{ux(rng), ux(rng)};
        double t = ut(rng), eps = std::exp(ue(rng));
        double b = s.b.value(x);
        Vec2 glogb = (1.0 / b) * s.b.gradient(x);
        Vec2 u = s.u0.value(x);
        double A = t * dot(u, glogb), B = t * dot(perp(u), glogb);
        if (std::abs(A) + std::abs(B) >= 0.9) continue;
        ++tested;
        PhaseSolution sol = solve_theta(s, x, t, eps, 1e-12);
        max_res = std::max(max_res, sol.residual);
        max_dev = std::max(max_dev, std::abs(sol.theta - bisect(A, B, b * t / eps)));
    }
    report(10, "theta solver", max_dev <= 1e-10 && max_res <= 1e-12,
           "1000 cases, max |fp - bisection| " + fmt(max_dev) + " (<=1e-10), max residual " +
               fmt(max_res) + " (<=1e-12)");
}

}  // namespace

int main() {
    std::printf("acceptance suite\n================\n");
    criterion_1_constant_b_exactness();
    criterion_2_speed_conservation();
    criteria_3_4_5_8_sweep();
    criterion_6_nsp();
    criterion_7_lifespan_and_caustic();
    criterion_9_determinism();
    criterion_10_theta_solver();
    std::printf("================\n%s (%d failure%s)\n", failures == 0 ? "ALL PASS" : "FAILED",
                failures, failures == 1 ? "" : "s");
    return failures == 0 ? 0 : 1;
}
