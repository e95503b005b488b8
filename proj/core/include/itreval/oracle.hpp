#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "itreval/data.hpp"
#include "itreval/estimate.hpp"
#include "itreval/rule.hpp"

namespace itreval {

// Full potential-outcome table. Finite-population semantics: every
// expectation is the empirical mean over these n units.
struct PotentialPopulation {
    std::vector<double> y0, y1;
    Covariates x;
    std::vector<double> scores;

    std::size_t n() const { return y0.size(); }
    void validate() const;
    // Observed data under a treatment vector.
    ExperimentData observe(const std::vector<std::uint8_t>& t) const;
};

struct OracleSpec {
    Metric metric = Metric::PAV;
    double p = 0.0;
    std::optional<Rule> rule_g;
};

double true_metric(const PotentialPopulation& pop, const Rule& rule, const OracleSpec& spec);

// n * [sum_k (k/n) mean_{top k}(tau) / n - mean(tau) / 2]
double true_qini(const PotentialPopulation& pop, std::span<const double> scores);

struct RandomizationDistribution {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;  // divisor = count
    std::vector<double> support;  // lexicographic assignment order
};

using Estimator = std::function<double(const ExperimentData&)>;

inline constexpr double kEnumerationGuard = 1e6;

double binomial_coefficient(std::size_t n, std::size_t k);

// Evaluates the estimator under all C(n, n1) complete randomizations.
RandomizationDistribution enumerate_randomizations(const PotentialPopulation& pop, std::size_t n1,
                                                   const Estimator& estimator,
                                                   unsigned threads = 1);

// Closed-form randomization variance of the SAPE estimator for a budgetless
// assignment f: (1/n)(n0/n1 S1 + n1/n0 S0 + 2 S01).
double sape_exact_variance(const PotentialPopulation& pop, std::span<const std::uint8_t> f,
                           std::size_t n1);

}  // namespace itreval
