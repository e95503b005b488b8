#pragma once

#include <vector>

#include "itreval/data.hpp"
#include "itreval/estimate.hpp"
#include "itreval/rule.hpp"
#include "itreval/variance_kit.hpp"

namespace itreval {

// Diagnostic keys shared with the cross-validation engine.
namespace diag {
inline constexpr const char* kS2Arm1 = "s2_arm1";
inline constexpr const char* kS2Arm0 = "s2_arm0";
inline constexpr const char* kKappa1 = "kappa1";
inline constexpr const char* kKappa0 = "kappa0";
inline constexpr const char* kKappaG1 = "kappa_g1";
inline constexpr const char* kKappaSubstituted = "kappa_substituted";
inline constexpr const char* kVarianceClamped = "variance_clamped";
inline constexpr const char* kTauHat = "tau_hat";
inline constexpr const char* kPfHat = "p_f_hat";
inline constexpr const char* kBudgetCount = "budget_count";
inline constexpr const char* kCovTerm = "cov_term";
inline constexpr const char* kZExpectation = "z_expectation_term";
inline constexpr const char* kZVariance = "z_variance_term";
}  // namespace diag

struct EstimationOptions {
    ZMomentOptions z;
};

MetricEstimate estimate_pav(const ExperimentData& data, const Rule& rule);
MetricEstimate estimate_pape(const ExperimentData& data, const Rule& rule);
MetricEstimate estimate_pape_budget(const ExperimentData& data, const Rule& rule, double p);
MetricEstimate estimate_papd_budget(const ExperimentData& data, const Rule& rule_f,
                                    const Rule& rule_g, double p);
MetricEstimate value_difference(const ExperimentData& data, const Rule& rule_f,
                                const Rule& rule_g);

struct CurvePoint {
    double p = 0.0;
    double value = 0.0;
    double pape = 0.0;
    double std_error = 0.0;
};

struct AupecCurve {
    std::vector<CurvePoint> points;
    MetricEstimate aupec;
    double p_f_hat = 0.0;
};

// c* is taken from the rule's floor threshold.
AupecCurve estimate_aupec(const ExperimentData& data, const Rule& rule,
                          const EstimationOptions& options = {});
MetricEstimate estimate_aupec_normalized(const ExperimentData& data, const Rule& rule,
                                         const EstimationOptions& options = {});

// Per-unit AUPEC weights w_i for scores and n_f treated at c*.
std::vector<double> aupec_weights(std::span<const double> scores, std::size_t n_f);

}  // namespace itreval
