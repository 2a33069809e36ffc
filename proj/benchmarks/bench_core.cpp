#include <benchmark/benchmark.h>

#include <cmath>

#include "evoset/bspline.hpp"
#include "evoset/inversion.hpp"
#include "evoset/levelset.hpp"
#include "evoset/oscillator.hpp"
#include "evoset/spectral.hpp"

using namespace evoset;

static void BM_Diagonalize(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Matrix h = build_hamiltonian_matrix({0.8, 0.3, 0.2}, BasisSpec{n, 1.0});
    for (auto _ : state) {
        EigenSystem es = diagonalize(h);
        benchmark::DoNotOptimize(es.eigenvalues.data());
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_Diagonalize)->RangeMultiplier(2)->Range(16, 128)->Complexity();

static void BM_ExactD01(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        SpectralResult r = exact_d01({1.0, 0.1, 0.05}, BasisSpec{n});
        benchmark::DoNotOptimize(r.d01_exact);
    }
}
BENCHMARK(BM_ExactD01)->Arg(20)->Arg(40);

static void BM_SampleField(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    ParameterGrid g{-2, 2, -2, 2, n, n};
    for (auto _ : state) {
        ScalarField f = sample_field(
            [](double a, double b) { return std::sin(a * b) + a * a; }, g, 0.0);
        benchmark::DoNotOptimize(f.values.data());
    }
    state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_SampleField)->Arg(41)->Arg(161);

static void BM_RefineContour(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    ParameterGrid g{-2, 2, -2, 2, n, n};
    const ScalarField f =
        sample_field([](double a, double b) { return a * a + b * b; }, g, 0.0);
    for (auto _ : state) {
        auto contours = refine_contour(f, 1.0);
        benchmark::DoNotOptimize(contours.data());
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_RefineContour)->RangeMultiplier(2)->Range(41, 328)->Complexity();

static void BM_FitSurface(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    SurfaceData data;
    data.rows = n;
    data.cols = n;
    data.points.resize(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double x = -1.0 + 2.0 * i / (n - 1);
            const double y = -1.0 + 2.0 * j / (n - 1);
            data.at(i, j) = {x, y, cubic_test_surface(x, y)};
        }
    for (auto _ : state) {
        BSplineSurface s = fit_surface(data, 3, 3, ParametrizationMethod::chord_length);
        benchmark::DoNotOptimize(s.control_net.data());
    }
}
BENCHMARK(BM_FitSurface)->Arg(9)->Arg(17)->Arg(33);

static void BM_EvalSurface(benchmark::State& state) {
    SurfaceData data;
    data.rows = 17;
    data.cols = 17;
    data.points.resize(17 * 17);
    for (int i = 0; i < 17; ++i)
        for (int j = 0; j < 17; ++j) {
            const double x = i / 16.0, y = j / 16.0;
            data.at(i, j) = {x, y, cubic_test_surface(x, y)};
        }
    const BSplineSurface s = fit_surface(data, 3, 3, ParametrizationMethod::chord_length);
    double u = 0.0;
    for (auto _ : state) {
        u += 0.6180339887498949;
        u -= std::floor(u);
        benchmark::DoNotOptimize(eval_surface(s, u, 1.0 - u));
    }
}
BENCHMARK(BM_EvalSurface);

static void BM_SolveB(benchmark::State& state) {
    const double target = evo_d01({0.8, 0.2, 0.37}).d01;
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_b(0.8, 0.2, target, {0.0, 1.0}));
    }
}
BENCHMARK(BM_SolveB);

static void BM_ThermalEvo(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(thermal_evo({1.0, 0.2, 0.1}, ThermalSpec{1.0}).value);
    }
}
BENCHMARK(BM_ThermalEvo);

BENCHMARK_MAIN();
