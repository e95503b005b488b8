#include <benchmark/benchmark.h>

#include <random>

#include "itreval/cv.hpp"

using namespace itreval;

namespace {

struct PairInput {
    std::vector<std::vector<std::uint8_t>> f;
    std::vector<double> a, b, alpha, beta;
};

PairInput make(std::size_t n, std::size_t K) {
    std::mt19937_64 eng(n * 31 + K);
    std::normal_distribution<double> norm;
    std::vector<std::vector<double>> scores(K, std::vector<double>(n));
    for (auto& row : scores)
        for (auto& v : row) v = norm(eng);
    PairInput in;
    in.f = rule_agreement(scores, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        in.a.push_back(norm(eng));
        in.b.push_back(norm(eng));
        in.alpha.push_back(i % 2);
        in.beta.push_back(1 - i % 2);
    }
    return in;
}

// Literal O(n^2 K) double loop for comparison.
double double_loop(const PairInput& in) {
    const std::size_t K = in.f.size(), n = in.a.size();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            double both = 0.0, fi = 0.0, fj = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                both += in.f[k][i] * in.f[k][j];
                fi += in.f[k][i];
                fj += in.f[k][j];
            }
            num += in.a[i] * in.b[j] * (both / K - (fi / K) * (fj / K));
            den += in.alpha[i] * in.beta[j];
        }
    return num / den;
}

void BM_PairCovariance(benchmark::State& state) {
    const auto in = make(static_cast<std::size_t>(state.range(0)), 5);
    for (auto _ : state) benchmark::DoNotOptimize(pair_covariance(in.f, in.a, in.b, in.alpha, in.beta));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PairCovariance)->RangeMultiplier(4)->Range(64, 65536)->Complexity(benchmark::oN);

void BM_PairCovarianceDoubleLoop(benchmark::State& state) {
    const auto in = make(static_cast<std::size_t>(state.range(0)), 5);
    for (auto _ : state) benchmark::DoNotOptimize(double_loop(in));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PairCovarianceDoubleLoop)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oNSquared);

void BM_CrossvalPape(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 eng(3);
    std::normal_distribution<double> norm;
    Covariates x;
    x.rows = n;
    x.cols = 3;
    std::vector<double> y(n);
    std::vector<std::uint8_t> t(n, 0);
    for (std::size_t i = 0; i < n / 2; ++i) t[i] = 1;
    std::shuffle(t.begin(), t.end(), eng);
    for (std::size_t i = 0; i < n; ++i) {
        const double x0 = norm(eng), x1 = norm(eng), x2 = norm(eng);
        x.values.insert(x.values.end(), {x0, x1, x2});
        y[i] = x1 + t[i] * (0.5 * x0) + norm(eng);
    }
    const auto d = ExperimentData::create(y, t, x);
    const LearnerSpec learner{LinearTLearner{}};
    for (auto _ : state) benchmark::DoNotOptimize(crossval(d, learner, CvMetricSpec::pape(), 5, 1).pooled.point);
}
BENCHMARK(BM_CrossvalPape)->Arg(500)->Arg(5000);

}  // namespace
