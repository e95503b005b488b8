#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "itreval/data.hpp"
#include "itreval/estimate.hpp"
#include "itreval/learners.hpp"
#include "itreval/metrics.hpp"

namespace itreval {

struct FoldPlan {
    std::size_t K = 0;
    std::vector<std::size_t> fold_of;
    std::vector<std::size_t> m, m1, m0;
    std::uint64_t seed = 0;
    bool unequal = false;

    std::vector<std::size_t> members(std::size_t k) const;
    std::vector<std::size_t> complement(std::size_t k) const;
};

FoldPlan make_folds(const ExperimentData& data, std::size_t K, std::uint64_t seed);

struct CvMetricSpec {
    Metric metric = Metric::PAPE;
    double p = 0.0;
    // Treatment floor for PAV/PAPE (score > c*) and AUPEC.
    double c_star = 0.0;
    std::optional<LearnerSpec> learner_g;

    static CvMetricSpec pav(double c_star = 0.0) { return {Metric::PAV, 0.0, c_star, {}}; }
    static CvMetricSpec pape(double c_star = 0.0) { return {Metric::PAPE, 0.0, c_star, {}}; }
    static CvMetricSpec pape_budget(double p) { return {Metric::PAPE_BUDGET, p, 0.0, {}}; }
    static CvMetricSpec papd_budget(double p, LearnerSpec g) {
        return {Metric::PAPD_BUDGET, p, 0.0, std::move(g)};
    }
    static CvMetricSpec aupec(double c_star = -std::numeric_limits<double>::infinity()) {
        return {Metric::AUPEC, 0.0, c_star, {}};
    }
};

struct CvOptions {
    EstimationOptions estimation;
    unsigned threads = 1;
};

struct CvResult {
    CvMetricSpec spec;
    FoldPlan plan;
    std::vector<MetricEstimate> per_fold;
    MetricEstimate pooled;
    double s2_f = 0.0;
    std::map<std::string, double> components;
    // Scores of every unit under each fold's fitted rule (K rows of n).
    std::vector<std::vector<double>> scores_all;
    std::vector<std::vector<double>> scores_g_all;
    // AUPEC only: kappa profile of each test fold under its fitted rule.
    std::vector<KappaProfile> fold_profiles;
    EstimationOptions estimation;
};

CvResult crossval(const ExperimentData& data, const LearnerSpec& learner, const CvMetricSpec& spec,
                  std::size_t K, std::uint64_t seed, const CvOptions& options = {});

CvResult cv_papd_budget(const ExperimentData& data, const LearnerSpec& learner_f,
                        const LearnerSpec& learner_g, double p, std::size_t K, std::uint64_t seed,
                        const CvOptions& options = {});
CvResult cv_aupec(const ExperimentData& data, const LearnerSpec& learner, double c_star,
                  std::size_t K, std::uint64_t seed, const CvOptions& options = {});

// Variance assemblies; each returns the unclamped variance and fills the
// result's components.
double cv_variance_pav(CvResult& result, const ExperimentData& data);
double cv_variance_pape(CvResult& result, const ExperimentData& data);
double cv_variance_pape_budget(CvResult& result);
double cv_variance_papd_budget(CvResult& result);
double cv_variance_aupec(CvResult& result);

// f_k(i) = 1{score_k(i) > c*} for every fold k and unit i.
std::vector<std::vector<std::uint8_t>> rule_agreement(const std::vector<std::vector<double>>& scores,
                                                       double c_star);

// Average over ordered pairs i != j of a_i b_j Cov-hat(f(X_i), f(X_j)), divided
// by the sum over i != j of alpha_i beta_j. O(nK).
double pair_covariance(const std::vector<std::vector<std::uint8_t>>& f, std::span<const double> a,
                       std::span<const double> b, std::span<const double> alpha,
                       std::span<const double> beta);

// E{Cov(f_i, f_j | X) Y_i(s) Y_j(t)} estimate.
double pair_covariance_st(const std::vector<std::vector<std::uint8_t>>& f,
                          const ExperimentData& data, int s, int t);

}  // namespace itreval
