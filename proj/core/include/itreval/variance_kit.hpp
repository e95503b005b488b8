#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "itreval/data.hpp"
#include "itreval/rule.hpp"

namespace itreval {

// Within-arm sample variance (denominator count-1) of values[i] over units
// with t_i = arm. nullopt when the arm has fewer than two units.
std::optional<double> arm_variance(const ExperimentData& data, std::span<const double> values,
                                   int arm);
double arm_mean(const ExperimentData& data, std::span<const double> values, int arm);

// Difference in means of y between treated and control units inside the
// group {i : f_i = group}. nullopt if either arm is empty inside the group.
std::optional<double> kappa_hat(const ExperimentData& data, std::span<const std::uint8_t> f,
                                int group);

// kappa1[z], kappa0[z] for z = 0..n, where group 1 is the top-z set. Entries
// that are not estimable are copied from z_min (group 1) or z_max (group 0).
struct KappaProfile {
    std::vector<double> kappa1;
    std::vector<double> kappa0;
    std::size_t z_min = 0;
    std::size_t z_max = 0;

    bool substituted1(std::size_t z) const { return z < z_min; }
    bool substituted0(std::size_t z) const { return z > z_max; }
};

KappaProfile kappa_profile(const ExperimentData& data, std::span<const double> scores);

struct BiasBound {
    double epsilon = 0.0;
    double probability_bound = 1.0;
    double gamma = 0.0;
    double cate_cap = 0.0;
};

BiasBound bias_bound_pape_budget(std::size_t n, double p, double epsilon, double cate_cap);
BiasBound bias_bound_aupec(std::size_t n, double p_f_hat, double epsilon, double cate_cap);
BiasBound bias_bound_papd(std::size_t n, double p, double epsilon, double cate_cap);

double papd_cov_bound(std::size_t n, double p, double kappa_f1, double kappa_g1);

enum class ZMode { MonteCarlo, ExactPolynomial };

struct ZMomentOptions {
    ZMode mode = ZMode::MonteCarlo;
    std::size_t draws = 10000;
    std::uint64_t seed = 0;
    // ExactPolynomial only: replace p^m by s(s-1)..(s-m+1)/(n(n-1)..(n-m+1)).
    bool unbiased_powers = false;
};

class ZMomentEngine {
public:
    // kappa arrays are indexed by z = 0..n (entry 0 is unused).
    ZMomentEngine(std::size_t n, double p_hat, std::vector<double> kappa1,
                  std::vector<double> kappa0, ZMomentOptions options = {});

    std::size_t n() const { return n_; }
    double p_hat() const { return p_hat_; }
    const ZMomentOptions& options() const { return options_; }

    // The bracketed expectation integrand and the quantity whose variance is
    // taken, as functions of Z = 0..n.
    const std::vector<double>& expectation_integrand() const { return a_; }
    const std::vector<double>& variance_argument() const { return b_; }

private:
    std::size_t n_;
    double p_hat_;
    ZMomentOptions options_;
    std::vector<double> a_;
    std::vector<double> b_;
};

struct ZMomentTerms {
    double expectation_term = 0.0;
    double variance_term = 0.0;
    // Monte Carlo standard errors of the two terms (zero in exact mode).
    double expectation_mcse = 0.0;
    double variance_mcse = 0.0;
};

ZMomentTerms z_moment_terms(const ZMomentEngine& engine);

// Binomial(n, p) probabilities for k = 0..n.
std::vector<double> binomial_pmf(std::size_t n, double p);

}  // namespace itreval
