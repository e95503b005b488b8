#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "itreval/errors.hpp"
#include "itreval/metrics.hpp"
#include "itreval/oracle.hpp"

using namespace itreval;

namespace {

PotentialPopulation random_population(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> norm;
    PotentialPopulation pop;
    for (std::size_t i = 0; i < n; ++i) {
        const double y0 = norm(eng);
        pop.y0.push_back(y0);
        pop.y1.push_back(y0 + 0.5 + norm(eng));
        pop.scores.push_back(norm(eng));
    }
    return pop;
}

PotentialPopulation transformed(const PotentialPopulation& pop, double a, double b) {
    PotentialPopulation out = pop;
    for (auto& v : out.y0) v = a * v + b;
    for (auto& v : out.y1) v = a * v + b;
    return out;
}

}  // namespace

TEST(TrueMetric, ConstantRuleHasZeroPape) {
    auto pop = random_population(9, 1);
    EXPECT_NEAR(true_metric(pop, Rule::fixed(Assignment(9, 1)), {Metric::PAPE}), 0.0, 1e-15);
    EXPECT_NEAR(true_metric(pop, Rule::fixed(Assignment(9, 0)), {Metric::PAPE}), 0.0, 1e-15);
}

TEST(TrueMetric, NoEffectMeansZero) {
    auto pop = random_population(10, 2);
    pop.y1 = pop.y0;
    const auto f = Rule::scoring(pop.scores, 0.0);
    const auto g = Rule::scoring(random_population(10, 3).scores, 0.0);
    EXPECT_NEAR(true_metric(pop, f, {Metric::PAPE}), 0.0, 1e-15);
    EXPECT_NEAR(true_metric(pop, f, {Metric::PAPD_BUDGET, 0.4, g}), 0.0, 1e-15);
    EXPECT_NEAR(true_metric(pop, f, {Metric::AUPEC}), 0.0, 1e-15);
}

TEST(TrueMetric, FourUnitBudgetExample) {
    PotentialPopulation pop;
    pop.y0 = {0, 0, 0, 0};
    pop.y1 = {2, 1, -1, -2};
    EXPECT_DOUBLE_EQ(true_metric(pop, Rule::scoring({4, 3, 2, 1}), {Metric::PAPE_BUDGET, 0.5}), 0.75);
}

TEST(TrueMetric, AupecShiftInvariance) {
    for (std::uint64_t s = 0; s < 10; ++s) {
        auto pop = random_population(15, 10 + s);
        const auto r = Rule::scoring(pop.scores, 0.2);
        const double base = true_metric(pop, r, {Metric::AUPEC});
        EXPECT_NEAR(true_metric(transformed(pop, 1.0, 3.7), r, {Metric::AUPEC}), base, 1e-12);
        const double nb = true_metric(pop, r, {Metric::AUPEC_NORM});
        EXPECT_NEAR(true_metric(transformed(pop, 2.0, 3.0), r, {Metric::AUPEC_NORM}), nb, 1e-12);
    }
}

TEST(TrueMetric, QiniIdentity) {
    for (std::uint64_t s = 0; s < 10; ++s) {
        auto pop = random_population(25, 30 + s);
        const auto r = Rule::scoring(pop.scores);
        EXPECT_NEAR(true_metric(pop, r, {Metric::AUPEC}), true_qini(pop, pop.scores) / 25.0, 1e-12);
    }
}

TEST(TrueMetric, PerfectRankingHasPositiveBudgetPape) {
    PotentialPopulation pop;
    pop.y0 = {0, 0, 0, 0, 0, 0};
    pop.y1 = {3, -1, 2, 0.5, -2, 1};
    // Scores rank tau descending; p = 1/3 picks tau 3 and 2, both above the mean.
    const std::vector<double> s{6, 2, 5, 3, 1, 4};
    EXPECT_GT(true_metric(pop, Rule::scoring(s), {Metric::PAPE_BUDGET, 1.0 / 3.0}), 0.0);
}

TEST(Enumerate, CountsAndGuard) {
    auto pop = random_population(4, 5);
    auto dist = enumerate_randomizations(pop, 2, [](const ExperimentData& d) {
        return d.treated_mean() - d.control_mean();
    });
    EXPECT_EQ(dist.count, 6u);
    EXPECT_EQ(dist.support.size(), 6u);
    EXPECT_EQ(binomial_coefficient(30, 15), 155117520.0);
    auto big = random_population(30, 6);
    EXPECT_THROW(enumerate_randomizations(big, 15, [](const ExperimentData&) { return 0.0; }),
                 SizeGuardError);
}

TEST(Enumerate, DifferenceInMeansIsUnbiased) {
    auto pop = random_population(8, 7);
    auto dist = enumerate_randomizations(pop, 3, [](const ExperimentData& d) {
        return d.treated_mean() - d.control_mean();
    });
    double ate = 0.0;
    for (std::size_t i = 0; i < 8; ++i) ate += (pop.y1[i] - pop.y0[i]) / 8.0;
    EXPECT_NEAR(dist.mean, ate, 1e-12);
}

TEST(Enumerate, SapeMeanAndClosedFormVariance) {
    for (std::uint64_t s = 0; s < 6; ++s) {
        const std::size_t n = 6 + 2 * (s % 3), n1 = n / 2 - (s % 2);
        auto pop = random_population(n, 40 + s);
        const auto f = Rule::scoring(pop.scores, 0.0);
        const auto fa = assignments(f);
        const double factor = (static_cast<double>(n) - 1.0) / static_cast<double>(n);
        auto dist = enumerate_randomizations(pop, n1, [&](const ExperimentData& d) {
            return factor * estimate_pape(d, f).point;
        });
        EXPECT_NEAR(dist.mean, true_metric(pop, f, {Metric::PAPE}), 1e-12);
        const double closed = sape_exact_variance(pop, fa, n1);
        EXPECT_NEAR(dist.variance, closed, 1e-10 * closed);
    }
}

TEST(Enumerate, ThreadCountDoesNotChangeResults) {
    auto pop = random_population(10, 8);
    const auto f = Rule::scoring(pop.scores, 0.0);
    auto est = [&](const ExperimentData& d) { return estimate_pav(d, f).point; };
    const auto a = enumerate_randomizations(pop, 5, est, 1);
    const auto b = enumerate_randomizations(pop, 5, est, 4);
    EXPECT_EQ(a.support, b.support);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.variance, b.variance);
}

TEST(PotentialPopulation, Validation) {
    PotentialPopulation pop;
    pop.y0 = {1, 2};
    pop.y1 = {1};
    EXPECT_THROW(pop.validate(), InputError);
    pop.y1 = {1, NAN};
    EXPECT_THROW(pop.validate(), InputError);
}
