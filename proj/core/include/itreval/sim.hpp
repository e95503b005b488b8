#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "itreval/data.hpp"
#include "itreval/estimate.hpp"
#include "itreval/learners.hpp"
#include "itreval/metrics.hpp"
#include "itreval/oracle.hpp"

namespace itreval {

enum class CovariateSource { Synthetic, UserCsv };

// Covariates referenced by the outcome model, in this order.
inline const std::array<std::string, 7> kDgpColumns = {"x1", "x3", "x10", "x14", "x15", "x24", "x43"};

struct DgpConfig {
    std::size_t n = 100;
    double xi = 2.0;
    std::size_t trials = 1000;
    std::uint64_t seed = 0;
    CovariateSource covariate_source = CovariateSource::Synthetic;
    std::string csv_path;
    // Synthetic population only.
    std::size_t population_size = 4302;
    std::uint64_t population_seed = 1;

    void validate() const;
};

// Synthetic covariates: x1, x3, x10 ~ N(0,1); x14, x15, x24, x43 ~ Bernoulli(0.5);
// plus one unused N(0,1) column x_aux.
Covariates synthetic_covariates(std::size_t rows, std::uint64_t seed);

struct DgpRow {
    double x1, x3, x10, x14, x15, x24, x43;
};

double dgp_pi(const DgpRow& r);
double dgp_mu(const DgpRow& r);
double dgp_tau(const DgpRow& r, double xi);

struct DgpSample {
    ExperimentData data;
    PotentialPopulation potential;
    std::vector<std::size_t> rows;  // population rows drawn
    double sigma = 0.0;
};

class Dgp {
public:
    explicit Dgp(DgpConfig config);

    const DgpConfig& config() const { return config_; }
    const Covariates& population() const { return population_; }
    DgpRow row(std::size_t i) const;

    // Bootstraps `size` rows (config.n when 0) and assigns floor(size/2) treated.
    DgpSample draw(std::uint64_t key, std::size_t size = 0) const;
    // Noise-free potential outcomes mu and mu + tau for every population row.
    PotentialPopulation truth_population() const;

private:
    DgpConfig config_;
    Covariates population_;
    std::array<std::size_t, 7> col_{};
};

DgpSample dgp_sample(const DgpConfig& config);

struct SimMetric {
    Metric metric = Metric::PAPE;
    double p = 0.0;

    std::string label() const;
};

struct FixedRuleMode {
    LearnerSpec f{LinearTLearner{}};
    LearnerSpec g{DiffMeansByBin{1, 4}};
    std::size_t train_n = 1000;
    double c_star = 0.0;
};

struct CrossvalMode {
    std::size_t K = 5;
    LearnerSpec f{LinearTLearner{}};
    LearnerSpec g{DiffMeansByBin{1, 4}};
    double c_star = 0.0;
    // Replications used to approximate the truth; 0 means config.trials.
    std::size_t aux_trials = 0;
};

using StudyMode = std::variant<FixedRuleMode, CrossvalMode>;

struct StudyOptions {
    EstimationOptions estimation;
    unsigned threads = 1;
    double z = 1.96;
    std::size_t max_redraws = 100;
};

struct MetricReport {
    std::string label;
    double truth = 0.0;
    double mean_estimate = 0.0;
    double bias = 0.0;
    double sd = 0.0;
    double mean_se = 0.0;
    double coverage = 0.0;
    std::size_t trials = 0;
    std::size_t redraws = 0;
};

struct CoverageReport {
    std::string scenario;
    std::string mode;
    DgpConfig config;
    std::vector<MetricReport> metrics;
};

CoverageReport coverage_study(const DgpConfig& config, const std::vector<SimMetric>& metrics,
                              const StudyMode& mode, const StudyOptions& options = {});

void write_report_csv(std::ostream& out, const std::vector<CoverageReport>& reports);
void write_report_table(std::ostream& out, const std::vector<CoverageReport>& reports);

}  // namespace itreval
