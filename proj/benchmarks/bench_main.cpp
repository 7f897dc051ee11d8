#include <benchmark/benchmark.h>

#include <array>
#include <cmath>
#include <numbers>

#include "pmhd/asymptotics.hpp"
#include "pmhd/characteristics.hpp"
#include "pmhd/inversion.hpp"
#include "pmhd/oscillatory.hpp"

namespace {

using namespace pmhd;

FieldSpec sinusoidal_spec() {
    FieldSpec s;
    s.b.family = BFamily::sinusoidal;
    s.b.b0 = 2.0;
    s.b.amplitude = 0.5;
    s.b.wavevector = {1, 0};
    s.u0.vector = {1, 0};
    return s;
}

void BM_rhs_reduced(benchmark::State& state) {
    FieldSpec s = sinusoidal_spec();
    ParticleState st;
    st.x0 = {0.3, 0.1};
    st.X = {0.31, 0.11};
    st.phi = 0.9;
    st.Dphi = {0.4, 0.0};
    for (auto _ : state) {
        StateDerivative d = rhs_reduced(st, s, 1e-2);
        benchmark::DoNotOptimize(d);
    }
}
BENCHMARK(BM_rhs_reduced);

void BM_integrate(benchmark::State& state) {
    FieldSpec s = sinusoidal_spec();
    double eps = 1.0 / static_cast<double>(state.range(0));
    IntegratorConfig cfg;
    cfg.b_sup = 2.5;
    const std::array<double, 1> out{1.0};
    for (auto _ : state) {
        Trajectory t = integrate(s, {0.2, 0.4}, eps, out, cfg);
        benchmark::DoNotOptimize(t.states.back().X);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_integrate)->RangeMultiplier(2)->Range(16, 256)->Complexity();

void BM_invert_X(benchmark::State& state) {
    FieldSpec s = sinusoidal_spec();
    IntegratorConfig cfg;
    cfg.b_sup = 2.5;
    for (auto _ : state) {
        InversionResult r = invert_X(s, {0.4, -0.3}, 0.5, 1e-2, cfg);
        benchmark::DoNotOptimize(r.preimage);
    }
}
BENCHMARK(BM_invert_X);

void BM_osc_integral(benchmark::State& state) {
    double eps = 1.0 / static_cast<double>(state.range(0));
    double t = 1.0;
    double period = 2.0 * std::numbers::pi * eps / 2.0;
    int n = static_cast<int>(std::ceil(t / (period / 24.0))) + 1;
    OscillandSample s;
    s.times.resize(n);
    s.F.resize(n);
    s.beta.resize(n);
    for (int i = 0; i < n; ++i) {
        double ti = t * i / (n - 1);
        s.times[i] = ti;
        s.F[i] = 1.0 + 0.3 * std::sin(1.3 * ti);
        s.beta[i] = 2.0 + 0.2 * std::cos(0.7 * ti);
    }
    for (auto _ : state) {
        double v = osc_integral(s, eps, TrigKind::cos);
        benchmark::DoNotOptimize(v);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_osc_integral)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

void BM_solve_theta(benchmark::State& state) {
    FieldSpec s;
    s.b.family = BFamily::exponential;
    s.b.b0 = 2.0;
    s.b.lambda = 1.0;
    s.b.window_lo = -0.6;
    s.b.window_hi = 0.6;
    s.u0.vector = {0.7, 0.4};
    for (auto _ : state) {
        PhaseSolution sol = solve_theta(s, {0.1, -0.1}, 0.4, 1e-2);
        benchmark::DoNotOptimize(sol.theta);
    }
}
BENCHMARK(BM_solve_theta);

}  // namespace

BENCHMARK_MAIN();
