#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "pmhd/config.hpp"
#include "pmhd/errors.hpp"
#include "pmhd/report.hpp"
#include "pmhd/sweep.hpp"

using namespace pmhd;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int data_rows(const std::string& csv) {
    int rows = -1;  // skip header
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) rows++;
    return rows;
}

ExperimentConfig mini_sinusoidal() {
    ExperimentConfig cfg;
    cfg.fields.b.family = BFamily::sinusoidal;
    cfg.fields.b.b0 = 2.0;
    cfg.fields.b.amplitude = 0.5;
    cfg.fields.b.wavevector = {1, 0};
    cfg.fields.u0.vector = {1, 0};
    cfg.fields.rho0.family = Rho0Family::gaussian;
    cfg.fields.rho0.base = 1.0;
    cfg.fields.rho0.amplitude = 0.5;
    cfg.fields.rho0.sigma = 1.0;
    cfg.domain = {{{-2, -2}, {2, 2}}, 65};
    cfg.seeds.grid_nx = 3;
    cfg.seeds.grid_ny = 3;
    cfg.seeds.inset = 0.25;
    cfg.eps_list = {0.1, 0.05, 0.025};
    cfg.T = 1.0;
    cfg.output_times = 9;
    cfg.eulerian.grid_resolution = 3;
    cfg.eulerian.grid_inset = 0.5;
    cfg.density.output_times = 9;
    cfg.workers = 2;
    return cfg;
}

ExperimentConfig mini_constant() {
    ExperimentConfig cfg = mini_sinusoidal();
    cfg.fields.b = BField{};
    cfg.fields.b.family = BFamily::constant;
    cfg.fields.b.b0 = 2.0;
    cfg.fields.rho0 = Rho0Field{};
    cfg.fields.rho0.base = 1.0;
    return cfg;
}

}  // namespace

TEST_CASE("fit_order on exact geometric data") {
    FitResult r1 = fit_order(std::vector<double>{1e-2, 5e-3, 2.5e-3},
                             std::vector<double>{0.1, 0.05, 0.025});
    CHECK(r1.slope == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r1.c_fit == doctest::Approx(0.1).epsilon(1e-10));
    CHECK(r1.residual < 1e-12);
    CHECK(r1.points_used == 3);

    FitResult r2 = fit_order(std::vector<double>{1e-2, 2.5e-3, 6.25e-4},
                             std::vector<double>{0.1, 0.05, 0.025});
    CHECK(r2.slope == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("fit_order with multiplicative noise stays near the true slope") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> jitter(0.9, 1.1);
    std::vector<double> eps{0.1, 0.05, 0.025, 0.0125, 0.00625};
    std::vector<double> errors;
    for (double e : eps) errors.push_back(0.3 * e * jitter(rng));
    FitResult r = fit_order(errors, eps);
    CHECK(r.slope > 0.85);
    CHECK(r.slope < 1.15);
}

TEST_CASE("fit_order drops zero errors and flags them") {
    FitResult r = fit_order(std::vector<double>{1e-2, 0.0, 2.5e-3, 1.25e-3},
                            std::vector<double>{0.1, 0.05, 0.025, 0.0125});
    CHECK(r.flag == "below noise floor");
    CHECK(r.points_used == 3);
    CHECK(r.slope == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("fit_order preconditions") {
    CHECK_THROWS_AS(fit_order(std::vector<double>{1.0, 2.0}, std::vector<double>{0.1, 0.05}),
                    ConfigError);
    CHECK_THROWS_AS(fit_order(std::vector<double>{1.0, 2.0, 3.0},
                              std::vector<double>{0.1, 0.05}),
                    ConfigError);
}

TEST_CASE("config files load and validate") {
    ExperimentConfig cfg = load_config(std::string(PMHD_SOURCE_DIR) + "/configs/sinusoidal.json");
    CHECK(cfg.eps_list.size() == 5);
    CHECK(cfg.T == 1.0);
    CHECK(cfg.fields.b.family == BFamily::sinusoidal);
    HypothesisReport env = hypothesis_envelope(cfg.fields, cfg.domain.rect);
    CHECK_NOTHROW(cfg.validate(env.t_star));
    CHECK(cfg.seeds.materialize(cfg.domain.rect).size() == 256);

    ExperimentConfig caustic = load_config(std::string(PMHD_SOURCE_DIR) + "/configs/caustic.json");
    CHECK(caustic.caustic.enabled);
    CHECK(caustic.seeds.points.size() == 3);
}

TEST_CASE("config validation failures") {
    ExperimentConfig cfg = mini_sinusoidal();
    cfg.eps_list = {0.05, 0.1};
    CHECK_THROWS_AS(cfg.validate(2.0), ConfigError);
    cfg = mini_sinusoidal();
    cfg.T = 2.5;  // above t_star = 2
    CHECK_THROWS_AS(cfg.validate(2.0), ConfigError);
    cfg.allow_beyond_t_star = true;
    CHECK_NOTHROW(cfg.validate(2.0));
    cfg = mini_sinusoidal();
    cfg.eps_list = {0.1, -0.05};
    CHECK_THROWS_AS(cfg.validate(2.0), ConfigError);
}

TEST_CASE("config echo round-trips through JSON") {
    ExperimentConfig cfg = mini_sinusoidal();
    std::string js = config_to_json(cfg);
    std::string path = "pmhd_test_cfg.json";
    {
        std::ofstream f(path);
        f << js;
    }
    ExperimentConfig back = load_config(path);
    CHECK(config_to_json(back) == js);
    std::filesystem::remove(path);
}

TEST_CASE("empty sweep produces a valid no-data report") {
    ExperimentConfig cfg = mini_constant();
    cfg.eps_list.clear();
    SweepReport rep = run_sweep(cfg);
    CHECK(rep.no_data);
    CHECK(rep.claims.empty());
    CHECK(rep.overall_pass);

    std::string dir = "pmhd_test_empty";
    emit_report(rep, {ReportFormat::csv, ReportFormat::json, ReportFormat::markdown}, dir);
    CHECK(data_rows(slurp(dir + "/errors.csv")) == 0);
    CHECK(slurp(dir + "/summary.md").find("no data") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("constant-b sweep runs in the exact regime") {
    ExperimentConfig cfg = mini_constant();
    SweepReport rep = run_sweep(cfg);
    CHECK(rep.overall_pass);
    for (const ClaimTable& c : rep.claims) {
        INFO(c.name);
        CHECK(c.pass);
        if (c.name != "confinement") {
            CHECK(c.errors.back() <= cfg.integrator.abs_tol);
            CHECK(c.fit.flag == "exact regime");
        }
    }
    std::string dir = "pmhd_test_const";
    emit_report(rep, {ReportFormat::markdown}, dir);
    CHECK(slurp(dir + "/summary.md").find("exact regime") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("sinusoidal mini sweep: structure, determinism, parallel equivalence") {
    ExperimentConfig cfg = mini_sinusoidal();
    SweepReport rep = run_sweep(cfg);

    CHECK(rep.claims.size() == 8);
    CHECK(rep.t_star == doctest::Approx(2.0));
    for (const BoundCheck& b : rep.bounds) {
        INFO(b.name, " eps=", b.eps);
        CHECK(b.pass);
    }
    for (const InversionCheck& ic : rep.inversion) CHECK(ic.pass);
    CHECK(rep.empirical_eps_T == doctest::Approx(0.1));

    std::string d1 = "pmhd_test_sweep1", d2 = "pmhd_test_sweep2";
    emit_report(rep, {ReportFormat::csv, ReportFormat::json, ReportFormat::markdown}, d1);

    // rerun with a different worker count: byte-identical artifacts
    ExperimentConfig cfg2 = mini_sinusoidal();
    cfg2.workers = 1;
    SweepReport rep2 = run_sweep(cfg2);
    rep2.workers = rep.workers;  // worker count is echoed metadata, not a result
    emit_report(rep2, {ReportFormat::csv, ReportFormat::json, ReportFormat::markdown}, d2);
    for (const char* f : {"/errors.csv", "/slopes.csv", "/bounds.csv", "/density.csv",
                          "/inversion.csv", "/summary.md"})
        CHECK(slurp(d1 + f) == slurp(d2 + f));

    // CSV row count: |claims| x |eps list|
    CHECK(data_rows(slurp(d1 + "/errors.csv")) ==
          static_cast<int>(rep.claims.size() * cfg.eps_list.size()));

    // report.json round-trips through the summary renderer
    std::string js = slurp(d1 + "/report.json");
    CHECK(summary_from_json(js) == slurp(d1 + "/summary.md"));
    CHECK(report_pass_from_json(js) == rep.overall_pass);

    // identical config, identical bytes
    SweepReport rep_again = run_sweep(cfg);
    CHECK(report_to_json(rep_again) == report_to_json(rep));

    std::filesystem::remove_all(d1);
    std::filesystem::remove_all(d2);
}

TEST_CASE("density adjudication names a winner and the losing variant floor") {
    ExperimentConfig cfg = mini_sinusoidal();
    SweepReport rep = run_sweep(cfg);
    REQUIRE(rep.density.size() == 2);
    for (const DensityAdjudication& adj : rep.density) {
        CHECK(adj.winner >= 0);
        CHECK(adj.direct_vs_conservative <= 1e-6);
        // the mini sweep stops at eps = 0.025; the separation is modest here
        // and widens on the full sweep (asserted at 5x in the acceptance run)
        CHECK(adj.loser_floor > 3.0 * adj.combos[adj.winner].errors.back());
        CHECK(adj.loser_flatness < 3.0);  // the loser error does not vanish with eps
    }
}

TEST_CASE("zero-velocity sweep reports errors at the noise floor") {
    ExperimentConfig cfg = mini_constant();
    cfg.fields.u0.vector = {0, 0};
    SweepReport rep = run_sweep(cfg);
    CHECK(rep.overall_pass);
    for (const ClaimTable& c : rep.claims) {
        INFO(c.name);
        if (c.name == "confinement") continue;
        CHECK(c.errors.back() <= 1e-10);
    }
}
