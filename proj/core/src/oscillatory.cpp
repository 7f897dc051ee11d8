#include "pmhd/oscillatory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pmhd/errors.hpp"

namespace pmhd {

namespace {

// Local polynomial interpolation through up to 4 neighbouring samples.
// The sampled functions vary on the slow O(1) timescale, so a 4-point
// stencil at an oscillation-resolving grid is accurate to ~machine level.

int stencil_start(int interval, int n, int width) {
    int j0 = interval - (width - 1) / 2;
    return std::clamp(j0, 0, n - width);
}

double lagrange_eval(const double* xs, const double* ys, int width, double x) {
    double acc = 0;
    for (int j = 0; j < width; ++j) {
        double term = ys[j];
        for (int k = 0; k < width; ++k) {
            if (k == j) continue;
            term *= (x - xs[k]) / (xs[j] - xs[k]);
        }
        acc += term;
    }
    return acc;
}

double lagrange_deriv(const double* xs, const double* ys, int width, double x) {
    double acc = 0;
    for (int j = 0; j < width; ++j) {
        double sum = 0;
        for (int m = 0; m < width; ++m) {
            if (m == j) continue;
            double prod = 1;
            for (int k = 0; k < width; ++k) {
                if (k == j || k == m) continue;
                prod *= (x - xs[k]) / (xs[j] - xs[k]);
            }
            sum += prod / (xs[j] - xs[m]);
        }
        acc += ys[j] * sum;
    }
    return acc;
}

// 3-point Gauss-Legendre on [a,b]: exact through degree 5.
template <class Fn>
double gauss3(Fn&& f, double a, double b) {
    static const double q = std::sqrt(3.0 / 5.0);
    double m = 0.5 * (a + b), r = 0.5 * (b - a);
    return r * ((5.0 / 9.0) * f(m - q * r) + (8.0 / 9.0) * f(m) + (5.0 / 9.0) * f(m + q * r));
}

// 8-point Gauss-Legendre nodes/weights on [-1,1].
constexpr double kGL8x[8] = {-0.9602898564975362, -0.7966664774136267, -0.5255324099163290,
                             -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                             0.7966664774136267,  0.9602898564975362};
constexpr double kGL8w[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                             0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                             0.2223810344533745, 0.1012285362903763};

struct Interpolant {
    const std::vector<double>& ts;
    const std::vector<double>& ys;
    int width;

    double at(int interval, double x) const {
        int j0 = stencil_start(interval, static_cast<int>(ts.size()), width);
        return lagrange_eval(ts.data() + j0, ys.data() + j0, width, x);
    }
    double deriv_at(int interval, double x) const {
        int j0 = stencil_start(interval, static_cast<int>(ts.size()), width);
        return lagrange_deriv(ts.data() + j0, ys.data() + j0, width, x);
    }
};

}  // namespace

void OscillandSample::validate() const {
    size_t n = times.size();
    if (n < 2) throw ConfigError("oscilland sample needs at least 2 points");
    if (F.size() != n || beta.size() != n)
        throw ConfigError("oscilland sample arrays must have equal length");
    if (times.front() != 0.0) throw ConfigError("oscilland sample must start at t = 0");
    for (size_t i = 1; i < n; ++i)
        if (!(times[i] > times[i - 1]))
            throw ConfigError("oscilland sample times must be strictly increasing");
    for (double b : beta)
        if (!(b > 0)) throw ConfigError("oscilland sample requires beta > 0");
}

double OscillandSample::lower_bound_beta() const {
    if (b_minus > 0) return b_minus;
    return *std::min_element(beta.begin(), beta.end());
}

double OscillandSample::sup_dF_over_beta() const {
    if (dF_over_beta_sup >= 0) return dF_over_beta_sup;
    size_t n = times.size();
    std::vector<double> g(n);
    for (size_t i = 0; i < n; ++i) g[i] = F[i] / beta[i];
    int width = static_cast<int>(std::min<size_t>(4, n));
    Interpolant gi{times, g, width};
    double sup = 0;
    for (size_t i = 0; i < n; ++i) {
        int interval = static_cast<int>(std::min(i, n - 2));
        sup = std::max(sup, std::abs(gi.deriv_at(interval, times[i])));
    }
    return sup;
}

double osc_integral(const OscillandSample& sample, double eps, TrigKind kind,
                    double eta_min) {
    sample.validate();
    if (!(eps > 0)) throw ConfigError("epsilon must be positive");
    const size_t n = sample.times.size();
    const int width = static_cast<int>(std::min<size_t>(4, n));
    Interpolant fb{sample.times, sample.beta, width};
    Interpolant ff{sample.times, sample.F, width};

    const double max_rad_per_interval = 2.0 * std::numbers::pi / eta_min;

    double integral = 0;
    double phi = 0;  // running integral of beta up to times[i]
    for (size_t i = 0; i + 1 < n; ++i) {
        const int iv = static_cast<int>(i);
        const double t0 = sample.times[i], t1 = sample.times[i + 1];
        const double dphi = gauss3([&](double s) { return fb.at(iv, s); }, t0, t1);
        if (dphi / eps > max_rad_per_interval)
            throw ResolutionError("oscilland grid does not resolve the oscillation");

        int panels = std::max(1, static_cast<int>(std::ceil(dphi / eps / 0.5)));
        double pa = t0;
        double phi_pa = phi;
        for (int p = 0; p < panels; ++p) {
            double pb = t0 + (t1 - t0) * (p + 1) / panels;
            double m = 0.5 * (pa + pb), r = 0.5 * (pb - pa);
            double acc = 0;
            for (int q = 0; q < 8; ++q) {
                double s = m + r * kGL8x[q];
                double phase = (phi_pa + gauss3([&](double u) { return fb.at(iv, u); }, pa, s)) / eps;
                double trig = kind == TrigKind::cos ? std::cos(phase) : std::sin(phase);
                acc += kGL8w[q] * ff.at(iv, s) * trig;
            }
            integral += r * acc;
            phi_pa += gauss3([&](double u) { return fb.at(iv, u); }, pa, pb);
            pa = pb;
        }
        phi += dphi;
    }
    return integral;
}

double nsp_bound(const OscillandSample& sample, double eps, TrigKind kind) {
    sample.validate();
    double bm = sample.lower_bound_beta();
    double t = sample.times.back();
    double boundary = std::abs(sample.F.back());
    if (kind == TrigKind::sin) boundary += std::abs(sample.F.front());
    return eps * (boundary / bm + t * sample.sup_dF_over_beta());
}

NspMargins verify_nsp(const OscillandSample& sample, double eps) {
    NspMargins m;
    m.margin_cos = nsp_bound(sample, eps, TrigKind::cos) -
                   std::abs(osc_integral(sample, eps, TrigKind::cos));
    m.margin_sin = nsp_bound(sample, eps, TrigKind::sin) -
                   std::abs(osc_integral(sample, eps, TrigKind::sin));
    return m;
}

}  // namespace pmhd
