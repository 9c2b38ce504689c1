#include <benchmark/benchmark.h>

#include <cmath>

#include "gs2d/manifold.hpp"
#include "gs2d/solver.hpp"

using namespace gs2d;

namespace {

RadialFunction gauss(const GridPtr& g, double beta = 0.5) {
    return RadialFunction::sample(g, [=](double r) { return std::exp(-beta * r * r); });
}

} // namespace

static void BM_Integrate(benchmark::State& state) {
    auto g = make_grid(12.0, static_cast<int>(state.range(0)));
    auto u = gauss(g);
    for (auto _ : state)
        benchmark::DoNotOptimize(integrate(u));
}
BENCHMARK(BM_Integrate)->Arg(1024)->Arg(2048);

static void BM_GradNormSq(benchmark::State& state) {
    auto g = make_grid(12.0, static_cast<int>(state.range(0)));
    auto u = gauss(g);
    for (auto _ : state)
        benchmark::DoNotOptimize(grad_norm_sq(u));
}
BENCHMARK(BM_GradNormSq)->Arg(1024)->Arg(2048);

static void BM_Laplacian(benchmark::State& state) {
    auto g = make_grid(12.0, static_cast<int>(state.range(0)));
    auto u = gauss(g);
    std::vector<double> out(u.values().begin(), u.values().end());
    for (auto _ : state) {
        laplacian_samples(*g, u.values(), out);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_Laplacian)->Arg(1024)->Arg(2048);

static void BM_ModelEval(benchmark::State& state) {
    const auto kind = static_cast<ModelKind>(state.range(0));
    NonlinearityModel model(kind, 1.0, 6.0, 1.0);
    double u = 0.3, v = 0.7, acc = 0.0;
    for (auto _ : state) {
        const auto c = model.eval(u, v);
        acc += c.H + c.Hu + c.Ht;
        u = 0.3 + 1e-9 * acc;
        benchmark::DoNotOptimize(acc);
    }
}
BENCHMARK(BM_ModelEval)->Arg(0)->Arg(1)->Arg(2);

static void BM_FiberDerivative(benchmark::State& state) {
    auto g = make_grid(12.0, static_cast<int>(state.range(0)));
    StatePair w{gauss(g), gauss(g)};
    NonlinearityModel model(ModelKind::CoupledExp, 1.0, 6.0, 1.0);
    const double kin = grad_norm_sq(w.u) + grad_norm_sq(w.v);
    for (auto _ : state)
        benchmark::DoNotOptimize(fiber_derivative(w, model, -0.5, kin));
}
BENCHMARK(BM_FiberDerivative)->Arg(1024)->Arg(2048);

static void BM_ProjectPohozaev(benchmark::State& state) {
    auto g = make_grid(12.0, static_cast<int>(state.range(0)));
    StatePair w{gauss(g, 2.0), gauss(g, 2.0)};
    NonlinearityModel model(ModelKind::PurePower, 1.0, 6.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(project_pohozaev(w, model));
}
BENCHMARK(BM_ProjectPohozaev)->Arg(1024);

static void BM_SolveGroundState(benchmark::State& state) {
    SolverConfig cfg;
    cfg.grid = GridSpec{12.0, static_cast<int>(state.range(0)), {}};
    cfg.model = NonlinearityModel(ModelKind::PurePower, 1.0, 6.0);
    cfg.constraint = MassConstraint(1.0, 1.0, 1.0);
    cfg.flow.n_starts = 1;
    // Pohozaev identity defect scales with h^2; budget it per grid
    const double h_ratio = 1024.0 / cfg.grid.n;
    cfg.flow.tol_pohozaev = 2.5e-4 * h_ratio * h_ratio;
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_ground_state(cfg));
}
BENCHMARK(BM_SolveGroundState)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
