#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "itreval/data.hpp"
#include "itreval/rule.hpp"

namespace itreval {

// Emits fixed per-unit scores, looked up by unit id; ignores training data.
struct ConstantScorer {
    std::vector<double> scores;
};

// Treated-minus-control mean of y within quantile bins of one covariate.
struct DiffMeansByBin {
    std::size_t covariate = 0;
    std::size_t bins = 4;
};

// Ridge regressions fit separately per arm; score = mu1(x) - mu0(x).
struct LinearTLearner {
    double lambda = 1e-8;
};

struct LearnerSpec {
    std::variant<ConstantScorer, DiffMeansByBin, LinearTLearner> kind;
    std::uint64_t seed = 0;

    std::string name() const;
};

class FittedScorer {
public:
    std::vector<double> score(const ExperimentData& eval) const;
    Rule rule(const ExperimentData& eval,
              double floor_threshold = -std::numeric_limits<double>::infinity()) const {
        return Rule::scoring(score(eval), floor_threshold);
    }

private:
    friend FittedScorer fit(const LearnerSpec&, const ExperimentData&);

    enum class Kind { Constant, Bins, Linear } kind_ = Kind::Constant;
    std::vector<double> constant_;
    std::size_t covariate_ = 0;
    std::vector<double> cuts_;
    std::vector<double> bin_effect_;
    std::vector<double> beta1_, beta0_;
};

FittedScorer fit(const LearnerSpec& spec, const ExperimentData& train);

}  // namespace itreval
