#include <benchmark/benchmark.h>

#include "gradbench/bench.hpp"
#include "gradbench/linesearch.hpp"
#include "gradbench/objectives.hpp"
#include "gradbench/optimizers.hpp"
#include "gradbench/report.hpp"

using namespace gradbench;

namespace {

// args: function index, method index into all_methods()
void BM_Minimize(benchmark::State& state) {
    const std::string name = objective_names()[static_cast<std::size_t>(state.range(0))];
    const Method method = all_methods()[static_cast<std::size_t>(state.range(1))];
    const ObjectiveFunction fn = make_objective(name);
    OptimizerConfig cfg;
    cfg.method = method;
    const Vec2 x0 = protocol_start_point(name);
    int iterations = 0;
    for (auto _ : state) {
        const Trace t = minimize(fn, x0, cfg);
        iterations = t.iterations();
        benchmark::DoNotOptimize(t.records.data());
    }
    state.SetLabel(name + "/" + std::string(method_name(method)));
    state.counters["iterations"] = iterations;
}

void minimize_args(benchmark::internal::Benchmark* b) {
    for (int f = 0; f < static_cast<int>(objective_names().size()); ++f)
        for (int m = 0; m < static_cast<int>(all_methods().size()); ++m) b->Args({f, m});
}

BENCHMARK(BM_Minimize)->Apply(minimize_args)->Unit(benchmark::kMicrosecond);

void BM_GoldenSection(benchmark::State& state) {
    const ObjectiveFunction fn = rosenbrock();
    const Vec2 x{-2.0, 2.0};
    const Vec2 d = steepest_direction(fn.gradient(x));
    const LineProblem lp{[&](double a) { return fn.value(x + a * d); }, fn.value(x), dot(fn.gradient(x), d)};
    for (auto _ : state) {
        const Bracket br = bracket_minimum(lp, 1e-3 / (1.0 + norm(d)), 2.0);
        benchmark::DoNotOptimize(golden_section(lp, br, 1e-10));
    }
}
BENCHMARK(BM_GoldenSection);

void BM_Sweep(benchmark::State& state) {
    const SweepSpec spec = default_sweep_spec("himmelblau", "bfgs");
    for (auto _ : state) benchmark::DoNotOptimize(sensitivity_sweep(spec).finals.data());
}
BENCHMARK(BM_Sweep)->Unit(benchmark::kMillisecond);

void BM_GridOracle(benchmark::State& state) {
    const ObjectiveFunction fn = spring_force();
    const int resolution = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(grid_argmin_oracle(fn, fn.plot_domain, resolution, 4));
}
BENCHMARK(BM_GridOracle)->Arg(101)->Arg(401)->Unit(benchmark::kMillisecond);

void BM_ContourSvg(benchmark::State& state) {
    const ObjectiveFunction fn = rosenbrock();
    PlotSpec spec;
    spec.kind = PlotKind::ContourWithTrajectories;
    const ContourGrid grid = contour_grid(fn, fn.plot_domain, 101, 101);
    OptimizerConfig cfg;
    cfg.method = Method::QuasiNewtonBfgs;
    const ContourPayload payload{grid, {minimize(fn, {-2.0, 2.0}, cfg)}};
    for (auto _ : state) benchmark::DoNotOptimize(render_svg(spec, payload).size());
}
BENCHMARK(BM_ContourSvg)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
