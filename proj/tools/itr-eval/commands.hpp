#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "report.hpp"

namespace itreval::cli {

struct Common {
    std::string input;
    std::string output;  // empty: stdout
    std::string outcome_col = "y";
    std::string treatment_col = "t";
    bool json = false;
    double alpha = 0.05;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    bool no_center = false;
    std::size_t z_draws = 10000;
    std::string z_mode = "mc";

    std::uint64_t resolved_seed() const;
};

struct RuleFlags {
    std::string rule_col;
    std::string rule_col_g;
    bool fixed = false;
    std::optional<double> threshold;
    std::optional<double> budget;
};

struct EvaluateArgs {
    Common common;
    RuleFlags rule;
    std::string metric = "pape";
    std::optional<double> cate_cap;
    double epsilon = 0.05;
};

struct CrossvalArgs {
    Common common;
    std::string metric = "pape";
    std::optional<double> budget;
    double threshold = 0.0;
    std::string covariates;
    std::string learner = "linear-t";
    std::string learner_g = "diff-means-bin";
    double ridge = 1e-8;
    std::string bin_covariate;
    std::size_t bins = 4;
    std::size_t folds = 5;
};

struct SimulateArgs {
    Common common;
    std::string scenario = "both";
    std::size_t n = 100;
    std::size_t trials = 1000;
    std::string mode = "fixed";
    std::size_t folds = 5;
    std::string metrics = "pape,pape-budget:0.2,aupec,papd:0.2";
    std::string covariate_csv;
    std::size_t aux_trials = 0;
    bool table = false;
};

struct OracleArgs {
    Common common;
    RuleFlags rule;
    std::string metric = "pape";
    std::string y0_col = "y0";
    std::string y1_col = "y1";
    std::optional<std::size_t> n1;
};

Record run_evaluate(const EvaluateArgs& a);
Record run_compare(const EvaluateArgs& a);
Record run_crossval(const CrossvalArgs& a);
Record run_curve(const EvaluateArgs& a);
// Writes its own output (CSV report or table).
void run_simulate(const SimulateArgs& a, std::ostream& out);
Record run_oracle_check(const OracleArgs& a);

}  // namespace itreval::cli
