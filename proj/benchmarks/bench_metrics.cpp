#include <benchmark/benchmark.h>

#include <random>

#include "itreval/metrics.hpp"
#include "itreval/special.hpp"
#include "itreval/variance_kit.hpp"

using namespace itreval;

namespace {

struct Fixture {
    ExperimentData data;
    std::vector<double> scores;
};

Fixture make(std::size_t n) {
    std::mt19937_64 eng(n);
    std::normal_distribution<double> norm;
    std::vector<double> y(n), s(n);
    std::vector<std::uint8_t> t(n, 0);
    for (std::size_t i = 0; i < n / 2; ++i) t[i] = 1;
    std::shuffle(t.begin(), t.end(), eng);
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = norm(eng);
        y[i] = t[i] * (0.3 + s[i]) + norm(eng);
    }
    return {ExperimentData::create(y, t), s};
}

void BM_Aupec(benchmark::State& state) {
    const auto f = make(static_cast<std::size_t>(state.range(0)));
    const auto rule = Rule::scoring(f.scores);
    EstimationOptions opts;
    opts.z.draws = 2000;
    for (auto _ : state) benchmark::DoNotOptimize(estimate_aupec(f.data, rule, opts).aupec.point);
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Aupec)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_KappaProfile(benchmark::State& state) {
    const auto f = make(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(kappa_profile(f.data, f.scores).kappa1.back());
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KappaProfile)->RangeMultiplier(4)->Range(64, 65536)->Complexity();

void BM_PapeBudget(benchmark::State& state) {
    const auto f = make(static_cast<std::size_t>(state.range(0)));
    const auto rule = Rule::scoring(f.scores);
    for (auto _ : state) benchmark::DoNotOptimize(estimate_pape_budget(f.data, rule, 0.2).point);
}
BENCHMARK(BM_PapeBudget)->Range(100, 10000);

void BM_RegIncBeta(benchmark::State& state) {
    const double a = static_cast<double>(state.range(0));
    double x = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(reg_inc_beta(x, a, a + 1.0));
        x = x > 0.9 ? 0.1 : x + 0.01;
    }
}
BENCHMARK(BM_RegIncBeta)->Arg(5)->Arg(50)->Arg(500)->Arg(5000);

}  // namespace
