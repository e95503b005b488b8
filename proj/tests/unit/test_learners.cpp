#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "itreval/errors.hpp"
#include "itreval/learners.hpp"

using namespace itreval;

namespace {

ExperimentData linear_toy(std::size_t n, std::uint64_t seed, double noise) {
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> norm;
    Covariates x;
    x.rows = n;
    x.cols = 2;
    x.names = {"x1", "x2"};
    std::vector<double> y(n);
    std::vector<std::uint8_t> t(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x1 = norm(eng), x2 = norm(eng);
        x.values.push_back(x1);
        x.values.push_back(x2);
        t[i] = i % 2;
        y[i] = 0.3 * x2 + 2.0 * t[i] * x1 + noise * norm(eng);
    }
    return ExperimentData::create(y, t, x);
}

}  // namespace

TEST(ConstantScorer, IgnoresTrainingData) {
    const LearnerSpec spec{ConstantScorer{{3, 1, 2}}};
    auto train = ExperimentData::create({9, 8, 7, 6}, {1, 0, 1, 0});
    auto fitted = fit(spec, train);
    auto eval = ExperimentData::create({0, 0, 0}, {1, 0, 1});
    EXPECT_EQ(fitted.score(eval), (std::vector<double>{3, 1, 2}));
    // Lookup is by unit id.
    const std::vector<std::size_t> idx{2, 0};
    EXPECT_EQ(fitted.score(eval.subset(idx)), (std::vector<double>{2, 3}));
}

TEST(LinearTLearner, RecoversEffectOrdering) {
    auto train = linear_toy(60, 1, 0.0);
    auto fitted = fit(LearnerSpec{LinearTLearner{0.0}}, train);
    auto eval = linear_toy(25, 2, 0.0);
    const auto s = fitted.score(eval);
    for (std::size_t i = 0; i < 25; ++i) EXPECT_NEAR(s[i], 2.0 * eval.x().at(i, 0), 1e-9);
    std::vector<std::size_t> by_score = rank_order(s), by_x(25);
    std::iota(by_x.begin(), by_x.end(), 0);
    std::sort(by_x.begin(), by_x.end(),
              [&](auto a, auto b) { return eval.x().at(a, 0) > eval.x().at(b, 0); });
    EXPECT_EQ(by_score, by_x);
}

TEST(LinearTLearner, ConstantOutcomesGiveTiedScores) {
    auto d = linear_toy(30, 3, 0.0);
    auto flat = d.with_outcomes(std::vector<double>(30, 4.0));
    const auto s = fit(LearnerSpec{LinearTLearner{}}, flat).score(flat);
    for (double v : s) EXPECT_NEAR(v, 0.0, 1e-9);
    auto tied = fit(LearnerSpec{LinearTLearner{1.0}}, flat).score(flat);
    for (double& v : tied) v = std::round(v * 1e6) / 1e6;
    std::vector<std::size_t> want(30);
    std::iota(want.begin(), want.end(), 0);
    EXPECT_EQ(rank_order(tied), want);
}

TEST(LinearTLearner, SingularDesignNeedsPenalty) {
    Covariates x;
    x.rows = 4;
    x.cols = 2;
    x.values = {1, 2, 2, 4, 3, 6, 4, 8};  // collinear columns
    auto d = ExperimentData::create({1, 2, 3, 4}, {1, 0, 1, 0}, x);
    EXPECT_THROW(fit(LearnerSpec{LinearTLearner{0.0}}, d), FitError);
    EXPECT_NO_THROW(fit(LearnerSpec{LinearTLearner{0.1}}, d));
    EXPECT_THROW(fit(LearnerSpec{LinearTLearner{-1.0}}, d), InputError);
}

TEST(LinearTLearner, NeedsCovariates) {
    auto d = ExperimentData::create({1, 2, 3, 4}, {1, 0, 1, 0});
    EXPECT_THROW(fit(LearnerSpec{LinearTLearner{}}, d), InputError);
}

TEST(LinearTLearner, RowOrderInvariant) {
    auto d = linear_toy(50, 4, 0.5);
    std::vector<std::size_t> perm(50);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), std::mt19937_64(9));
    auto a = fit(LearnerSpec{LinearTLearner{0.01}}, d).score(d);
    auto b = fit(LearnerSpec{LinearTLearner{0.01}}, d.subset(perm)).score(d);
    for (std::size_t i = 0; i < 50; ++i) EXPECT_NEAR(a[i], b[i], 1e-10);
}

TEST(DiffMeansByBin, BinEffects) {
    Covariates x;
    x.rows = 8;
    x.cols = 1;
    x.values = {0, 0, 0, 0, 1, 1, 1, 1};
    // Low bin effect 1, high bin effect 5.
    auto d = ExperimentData::create({2, 1, 2, 1, 6, 1, 6, 1}, {1, 0, 1, 0, 1, 0, 1, 0}, x);
    auto fitted = fit(LearnerSpec{DiffMeansByBin{0, 2}}, d);
    const auto s = fitted.score(d);
    EXPECT_DOUBLE_EQ(s[0], 1.0);
    EXPECT_DOUBLE_EQ(s[5], 5.0);
}

TEST(DiffMeansByBin, EmptyCellFallsBackToAte) {
    Covariates x;
    x.rows = 6;
    x.cols = 1;
    x.values = {0, 1, 2, 3, 4, 5};
    // Highest bin holds only treated units.
    auto d = ExperimentData::create({1, 0, 1, 0, 3, 3}, {1, 0, 1, 0, 1, 1}, x);
    auto fitted = fit(LearnerSpec{DiffMeansByBin{0, 3}}, d);
    const double ate = d.treated_mean() - d.control_mean();
    EXPECT_DOUBLE_EQ(fitted.score(d)[5], ate);
}

TEST(Learners, Deterministic) {
    auto d = linear_toy(40, 5, 1.0);
    for (const LearnerSpec& spec :
         {LearnerSpec{LinearTLearner{}}, LearnerSpec{DiffMeansByBin{1, 4}}}) {
        EXPECT_EQ(fit(spec, d).score(d), fit(spec, d).score(d)) << spec.name();
    }
}
