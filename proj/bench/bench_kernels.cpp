// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <random>

#include "pertspec/linop.hpp"
#include "pertspec/report.hpp"
#include "pertspec/rootscan.hpp"

using namespace pertspec;

namespace {

ExecPolicy policy_of(const benchmark::State& state) {
    return state.range(0) == 0 ? ExecPolicy::serial : ExecPolicy::parallel;
}

ComplexMatrix random_matrix(std::size_t n) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = {u(rng), u(rng)};
    return m;
}

ProblemSpec wentzell() {
    using BF = BoundaryFunctional;
    ProblemSpec s;
    s.kind = SecondDerivative{};
    s.psi = {BF::point(0.0, 2) - BF::point(0.0, 1), BF::point(1.0, 2) - BF::point(1.0, 1)};
    s.region = {{-45.0, -1.0}, {2.0, 1.0}};
    return s;
}

}  // namespace

static void lu(benchmark::State& state) {
    const ComplexMatrix m = random_matrix(static_cast<std::size_t>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(lu_decompose(m, policy_of(state)));
}
BENCHMARK(lu)->ArgsProduct({{0, 1}, {128, 384}})->Unit(benchmark::kMillisecond);

static void contour(benchmark::State& state) {
    const CharFunction f = CharFunction::from_spec(wentzell());
    for (auto _ : state) benchmark::DoNotOptimize(winding_count(f, wentzell().region, policy_of(state)));
}
BENCHMARK(contour)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void f_grid(benchmark::State& state) {
    const CharFunction f = CharFunction::from_spec(wentzell());
    for (auto _ : state) benchmark::DoNotOptimize(sample_grid(f, wentzell().region, 64, 64, policy_of(state)));
}
BENCHMARK(f_grid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void scan(benchmark::State& state) {
    const CharFunction f = CharFunction::from_spec(wentzell());
    for (auto _ : state)
        benchmark::DoNotOptimize(find_zeros(f, wentzell().region, 1e-10, {policy_of(state), 0}));
}
BENCHMARK(scan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
