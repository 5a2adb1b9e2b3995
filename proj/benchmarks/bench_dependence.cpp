#include <benchmark/benchmark.h>

#include <vector>

#include "cvt/dependence.hpp"
#include "cvt/rng.hpp"

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed, bool ties) {
    cvt::Rng rng(seed);
    std::vector<double> v(n);
    for (double& x : v) x = ties ? static_cast<double>(rng.below(16)) : rng.uniform();
    return v;
}

void BM_KendallTau(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto x = random_values(n, 1, false);
    const auto y = random_values(n, 2, false);
    for (auto _ : state) benchmark::DoNotOptimize(cvt::kendall_tau(x, y));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KendallTau)->Range(64, 1 << 14)->Complexity(benchmark::oNLogN);

void BM_KendallTauTied(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto x = random_values(n, 3, true);
    const auto y = random_values(n, 4, true);
    for (auto _ : state) benchmark::DoNotOptimize(cvt::kendall_tau(x, y));
}
BENCHMARK(BM_KendallTauTied)->Range(64, 1 << 14);

void BM_AdjacentCorrelations(benchmark::State& state) {
    const std::vector<std::size_t> widths{4, 6, 6, 3};
    cvt::Rng rng(5);
    cvt::ActivationTrace trace;
    trace.layer_widths = widths;
    trace.values = cvt::Matrix(static_cast<std::size_t>(state.range(0)), 19);
    for (double& v : trace.values.data()) v = rng.uniform();
    const auto pseudo =
        cvt::pseudo_observations(trace, cvt::fit_all_cdfs(trace, cvt::CdfMode::histogram, 20));
    for (auto _ : state)
        benchmark::DoNotOptimize(
            cvt::adjacent_correlations(pseudo, cvt::CorrelationKind::kendall_tau_b));
}
BENCHMARK(BM_AdjacentCorrelations)->Arg(120)->Arg(1000);

} // namespace
