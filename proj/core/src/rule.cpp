#include "itreval/rule.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "itreval/errors.hpp"

namespace itreval {

Rule Rule::fixed(Assignment values) {
    for (auto v : values)
        if (v > 1) throw InputError("fixed assignment values must be 0 or 1");
    Rule r;
    r.kind_ = FixedAssignment{std::move(values)};
    return r;
}

Rule Rule::scoring(std::vector<double> scores, double floor_threshold) {
    for (double s : scores)
        if (!std::isfinite(s)) throw InputError("scores must be finite");
    if (std::isnan(floor_threshold)) throw InputError("floor threshold is NaN");
    Rule r;
    r.kind_ = Scoring{std::move(scores), floor_threshold};
    return r;
}

std::size_t Rule::size() const {
    if (auto* s = std::get_if<Scoring>(&kind_)) return s->scores.size();
    return std::get<FixedAssignment>(kind_).values.size();
}

const Scoring& Rule::as_scoring() const {
    if (auto* s = std::get_if<Scoring>(&kind_)) return *s;
    throw InputError("rule is not a scoring rule");
}

const FixedAssignment& Rule::as_fixed() const {
    if (auto* f = std::get_if<FixedAssignment>(&kind_)) return *f;
    throw InputError("rule is not a fixed assignment");
}

Rule Rule::subset(std::span<const std::size_t> idx) const {
    if (auto* s = std::get_if<Scoring>(&kind_)) {
        std::vector<double> v;
        v.reserve(idx.size());
        for (auto i : idx) v.push_back(s->scores.at(i));
        return scoring(std::move(v), s->floor_threshold);
    }
    const auto& f = std::get<FixedAssignment>(kind_).values;
    Assignment v;
    v.reserve(idx.size());
    for (auto i : idx) v.push_back(f.at(i));
    return fixed(std::move(v));
}

std::size_t budget_count(std::size_t n, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("budget must lie in [0, 1]");
    const double k = std::floor(static_cast<double>(n) * p + 1e-9);
    return std::min<std::size_t>(n, static_cast<std::size_t>(std::max(0.0, k)));
}

std::vector<std::size_t> rank_order(std::span<const double> scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return order;
}

std::vector<std::size_t> ranks(std::span<const double> scores) {
    auto order = rank_order(scores);
    std::vector<std::size_t> r(scores.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) r[order[pos]] = pos + 1;
    return r;
}

Assignment top_k(std::span<const double> scores, std::size_t k) {
    Assignment a(scores.size(), 0);
    auto order = rank_order(scores);
    for (std::size_t pos = 0; pos < k && pos < order.size(); ++pos) a[order[pos]] = 1;
    return a;
}

BudgetThreshold threshold_for_budget(const Rule& rule, double p) {
    const auto& s = rule.as_scoring();
    const std::size_t n = s.scores.size();
    BudgetThreshold out;
    out.k = budget_count(n, p);
    auto order = rank_order(s.scores);
    out.treated.assign(n, 0);
    for (std::size_t pos = 0; pos < out.k; ++pos) out.treated[order[pos]] = 1;
    if (out.k == n)
        out.threshold = -std::numeric_limits<double>::infinity();
    else if (out.k == 0)
        out.threshold = std::numeric_limits<double>::infinity();
    else
        out.threshold = s.scores[order[out.k]];
    return out;
}

Assignment assignments(const Rule& rule, std::optional<double> budget) {
    if (!rule.is_scoring()) {
        if (budget) throw InputError("a budget requires a scoring rule, not a fixed assignment");
        return rule.as_fixed().values;
    }
    if (budget) return threshold_for_budget(rule, *budget).treated;
    const auto& s = rule.as_scoring();
    Assignment a(s.scores.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = s.scores[i] > s.floor_threshold;
    return a;
}

}  // namespace itreval
