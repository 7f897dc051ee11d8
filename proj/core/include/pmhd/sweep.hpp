#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pmhd/asymptotics.hpp"
#include "pmhd/config.hpp"
#include "pmhd/fields.hpp"
#include "pmhd/oscillatory.hpp"

namespace pmhd {

/// Least-squares line on (log eps, log error). c_fit = exp(intercept) is the
/// fitted remainder constant.
struct FitResult {
    double slope = 0;
    double intercept = 0;   // in log space
    double c_fit = 0;
    double residual = 0;    // rms of log-space fit residuals
    int points_used = 0;
    bool exact_regime = false;
    std::string flag;       // "", "exact regime", "below noise floor", "insufficient points"
};

/// Throws ConfigError unless >= 3 (eps, error) pairs are supplied. Zero (or
/// non-finite) errors are dropped and flagged "below noise floor".
FitResult fit_order(std::span<const double> errors, std::span<const double> eps_list);

/// One verified claim: per-eps L-inf errors plus the fitted order.
struct ClaimTable {
    std::string name;
    std::vector<double> errors;   // parallel to the sweep's eps list
    FitResult fit;
    double window_lo = 0;         // slope acceptance window; 0,0 = none
    double window_hi = 0;
    bool pass = false;
    std::string note;
};

/// One a priori bound evaluated at one eps: margin = bound - measured.
struct BoundCheck {
    std::string name;
    double eps = 0;
    double measured = 0;
    double bound = 0;
    double margin = 0;
    bool pass = false;
};

struct DensityCombo {
    RhoVariant variant{};
    RhoSign sign{};
    std::vector<double> errors;
    FitResult fit;
};

/// Race of the four (variant, sign) density predictors against the measured
/// density in one frame. The winner minimizes the L-inf error at the smallest
/// eps; the losing trig variant's error floor is recorded.
struct DensityAdjudication {
    Frame frame{};
    double horizon = 0;
    std::vector<DensityCombo> combos;  // theorem/paper, theorem/flipped, prop/paper, prop/flipped
    int winner = -1;
    bool winner_pass = false;          // winner slope inside [0.8, 1.2] (or exact regime)
    double loser_floor = 0;            // min over eps of the other variant's best error
    double loser_flatness = 0;         // max/min over eps of that error
    double direct_vs_conservative = 0; // max |direct continuity integration - rho0/J|
};

struct InversionCheck {
    std::string label;  // "velocity" | "density"
    double t = 0;
    double eps = 0;
    int nodes = 0;
    int converged = 0;
    int max_newton_iters = 0;
    double max_preimage_disp_over_eps = 0;
    bool pass = false;  // 100% convergence
};

struct CausticSection {
    double eps = 0;
    std::optional<double> t_numeric;
    std::optional<double> t_predicted;  // 1 / max_seeds |u0||grad log b|
    Vec2 argmin_seed;
    double min_jacobian = 1;
    double rel_error = 0;
    bool pass = false;
};

struct SweepReport {
    std::string config_echo;
    HypothesisReport hyp_grid;
    HypothesisReport envelope;
    double t_star = 0;
    std::vector<double> eps_list;
    std::vector<ClaimTable> claims;
    std::vector<BoundCheck> bounds;
    std::vector<DensityAdjudication> density;
    std::vector<InversionCheck> inversion;
    std::optional<CausticSection> caustic;
    double empirical_eps_T = 0;  // largest swept eps with all per-eps checks passing
    bool no_data = false;
    bool overall_pass = false;
    // deterministic run metadata (wall time deliberately excluded: reports are byte-stable)
    int workers = 1;
    long long total_trajectories = 0;
    long long total_steps = 0;
};

/// Run the full sweep: integrate the seed ensemble per eps, evaluate every
/// predictor, verify every a priori bound, adjudicate the density variants,
/// run the Eulerian inversions, and (optionally) the caustic detection.
SweepReport run_sweep(const ExperimentConfig& config);

/// Caustic experiment alone (harness subcommand).
CausticSection run_caustic(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Randomized non-stationary-phase suite: trig-polynomial F and beta in
// [b_center - spread, b_center + spread], margins checked for both kinds.
// ---------------------------------------------------------------------------

struct NspCase {
    double eps = 0;
    double margin_cos = 0;
    double margin_sin = 0;
};

struct NspSuiteResult {
    int samples = 0;
    std::vector<double> eps_list;
    std::vector<NspCase> cases;
    double min_margin = 0;
    int violations = 0;  // margins below -1e-12
    bool pass = false;
};

struct NspSuiteParams {
    int samples = 100;
    std::vector<double> eps_list{1e-1, 1e-2, 1e-3};
    std::uint64_t seed = 20250810;
    double t = 0.5;
    double b_center = 2.0;
    double b_spread = 0.5;   // beta stays in [1.5, 2.5]
    int harmonics = 3;
    double grid_eta = 24.0;  // sample points per oscillation period
};

NspSuiteResult run_nsp_suite(const NspSuiteParams& params);

/// Deterministic generator for one randomized oscilland (exposed for tests).
OscillandSample make_random_oscilland(std::uint64_t seed, int index, double eps,
                                      const NspSuiteParams& params);

}  // namespace pmhd
