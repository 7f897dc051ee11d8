#pragma once

#include <vector>

namespace pmhd {

/// Sampled oscilland for integrals of the form
///   int_0^t F(s) * trig( (1/eps) int_0^s beta ) ds,   beta >= b_minus > 0.
struct OscillandSample {
    std::vector<double> times;   // increasing grid over [0, t], times[0] == 0
    std::vector<double> F;       // samples of F
    std::vector<double> beta;    // samples of beta
    double b_minus = 0.0;        // declared lower bound; 0 = min(beta)
    double dF_over_beta_sup = -1.0;  // sup |d/ds (F/beta)|; < 0 = estimate from samples

    void validate() const;
    double lower_bound_beta() const;
    double sup_dF_over_beta() const;
};

enum class TrigKind { cos, sin };

/// Composite quadrature of the oscillatory integral on the sample grid.
/// The phase is the running integral of the beta interpolant; each grid
/// interval is split into Gauss-Legendre panels spanning <= ~0.5 rad of
/// phase, so refining the grid twofold changes the result by < 1e-8 relative.
/// Throws ResolutionError when the grid advances more than 2*pi/eta_min
/// radians of phase per interval.
double osc_integral(const OscillandSample& sample, double eps, TrigKind kind,
                    double eta_min = 8.0);

/// Integration-by-parts bound:
///   cos:  eps * ( |F(t)| / b_minus + t * sup|d/ds (F/beta)| )
///   sin:  eps * ( (|F(t)| + |F(0)|) / b_minus + t * sup|d/ds (F/beta)| )
double nsp_bound(const OscillandSample& sample, double eps, TrigKind kind);

struct NspMargins {
    double margin_cos = 0;  // bound - |integral|
    double margin_sin = 0;
};

NspMargins verify_nsp(const OscillandSample& sample, double eps);

}  // namespace pmhd
