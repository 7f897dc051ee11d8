#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pmhd/asymptotics.hpp"
#include "pmhd/characteristics.hpp"
#include "pmhd/fields.hpp"

namespace pmhd {

/// Seed set: explicit points, or an nx x ny grid inset from the domain edge.
struct SeedSpec {
    std::vector<Vec2> points;  // used when non-empty
    int grid_nx = 0;
    int grid_ny = 0;
    double inset = 0.0;

    std::vector<Vec2> materialize(const Rect& domain) const;
};

struct CausticConfig {
    bool enabled = false;
    double t_max_factor = 1.3;   // t_max = factor / (|u0| |grad log b|) estimate
    std::optional<double> t_max; // absolute override
    std::optional<double> eps;   // defaults to smallest swept eps
};

struct EulerianConfig {
    int grid_resolution = 8;
    double grid_inset = 0.5;
    double time_factor = 0.5;    // t_euler = factor * t_star
    std::optional<double> time;  // absolute override
    double newton_tol = 1e-10;
};

struct DensityConfig {
    RhoConvention convention = RhoConvention::conservative;
    RhoVariant variant = RhoVariant::theorem_form;  // default reporting choice
    RhoSign sign = RhoSign::flipped;
    // Density-claim horizon = factor * t_star. Any affine-in-t predictor sits
    // on an O((t |u0| |grad log b|)^2) floor against rho0/J, so the horizon
    // must keep that floor below the O(eps) signal across the swept eps.
    double time_factor = 0.05;
    std::optional<double> time;  // absolute override
    int output_times = 17;
};

/// Full experiment description; mirrors the JSON config file schema.
struct ExperimentConfig {
    FieldSpec fields;
    DomainSample domain;
    SeedSpec seeds;
    std::vector<double> eps_list;        // strictly decreasing, positive
    double T = 1.0;                      // Lagrangian horizon, must be < t_star
    bool allow_beyond_t_star = false;    // caustic experiments override the check
    int output_times = 33;               // samples of [0, T]
    IntegratorConfig integrator;
    EulerianConfig eulerian;
    DensityConfig density;
    CausticConfig caustic;
    int workers = 1;
    std::string output_dir = "out";

    /// Throws ConfigError on violated invariants. Needs t_star from the
    /// analytic envelope to enforce T < t_star.
    void validate(double t_star) const;

    std::vector<double> lagrangian_times() const;  // linspace(0, T, output_times)
};

ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);  // canonical echo for reports

}  // namespace pmhd
