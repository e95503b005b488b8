#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace itreval {

using Assignment = std::vector<std::uint8_t>;

struct FixedAssignment {
    Assignment values;
};

struct Scoring {
    std::vector<double> scores;
    // c*: units with score > floor_threshold are treated when no budget applies.
    double floor_threshold = -std::numeric_limits<double>::infinity();
};

class Rule {
public:
    static Rule fixed(Assignment values);
    static Rule scoring(std::vector<double> scores,
                        double floor_threshold = -std::numeric_limits<double>::infinity());

    bool is_scoring() const { return std::holds_alternative<Scoring>(kind_); }
    std::size_t size() const;
    const Scoring& as_scoring() const;
    const FixedAssignment& as_fixed() const;

    Rule subset(std::span<const std::size_t> idx) const;

private:
    std::variant<FixedAssignment, Scoring> kind_;
};

// Number of units a budget p allows out of n.
std::size_t budget_count(std::size_t n, double p);

// Unit indices sorted by descending score; equal scores keep ascending index.
std::vector<std::size_t> rank_order(std::span<const double> scores);

// rank[i] = 1-based position of unit i in rank_order.
std::vector<std::size_t> ranks(std::span<const double> scores);

struct BudgetThreshold {
    double threshold = 0.0;  // c-hat_p: the (k+1)-th largest score
    Assignment treated;      // top k units
    std::size_t k = 0;
};

BudgetThreshold threshold_for_budget(const Rule& rule, double p);

// Top-k assignment under the tie rule.
Assignment top_k(std::span<const double> scores, std::size_t k);

Assignment assignments(const Rule& rule, std::optional<double> budget = std::nullopt);

}  // namespace itreval
