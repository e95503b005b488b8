#include "itreval/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "itreval/errors.hpp"
#include "itreval/parallel.hpp"

namespace itreval {

void PotentialPopulation::validate() const {
    if (y0.size() != y1.size()) throw InputError("potential outcome lengths differ");
    for (std::size_t i = 0; i < y0.size(); ++i)
        if (!std::isfinite(y0[i]) || !std::isfinite(y1[i]))
            throw InputError("non-finite potential outcome");
    if (!scores.empty() && scores.size() != y0.size())
        throw InputError("score length does not match population");
    if (!x.empty() && x.rows != y0.size())
        throw InputError("covariate rows do not match population");
}

ExperimentData PotentialPopulation::observe(const std::vector<std::uint8_t>& t) const {
    std::vector<double> y(n());
    for (std::size_t i = 0; i < n(); ++i) y[i] = t[i] ? y1[i] : y0[i];
    return ExperimentData::create(std::move(y), t, x);
}

namespace {

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Mean outcome when units with f_i = 1 are treated.
double value_of(const PotentialPopulation& pop, std::span<const std::uint8_t> f) {
    double s = 0.0;
    for (std::size_t i = 0; i < pop.n(); ++i) s += f[i] ? pop.y1[i] : pop.y0[i];
    return s / static_cast<double>(pop.n());
}

double aupec_numerator(const PotentialPopulation& pop, const Scoring& sc) {
    const std::size_t n = pop.n();
    std::size_t n_f = 0;
    for (double s : sc.scores) n_f += s > sc.floor_threshold;
    const auto order = rank_order(sc.scores);
    // Riemann sum over the k/n grid up to p_f, then the plateau at c*.
    double area = 0.0;
    for (std::size_t k = 1; k <= n_f; ++k) {
        std::vector<std::uint8_t> f(n, 0);
        for (std::size_t pos = 0; pos < k; ++pos) f[order[pos]] = 1;
        area += value_of(pop, f) / static_cast<double>(n);
    }
    std::vector<std::uint8_t> fc(n, 0);
    for (std::size_t i = 0; i < n; ++i) fc[i] = sc.scores[i] > sc.floor_threshold;
    area += (1.0 - static_cast<double>(n_f) / static_cast<double>(n)) * value_of(pop, fc);
    return area;
}

}  // namespace

double true_metric(const PotentialPopulation& pop, const Rule& rule, const OracleSpec& spec) {
    pop.validate();
    if (rule.size() != pop.n()) throw InputError("rule length does not match population");
    const double m1 = mean(pop.y1), m0 = mean(pop.y0);
    switch (spec.metric) {
        case Metric::PAV:
            return value_of(pop, assignments(rule));
        case Metric::PAPE: {
            const auto f = assignments(rule);
            double pf = 0.0;
            for (auto v : f) pf += v;
            pf /= static_cast<double>(pop.n());
            return value_of(pop, f) - pf * m1 - (1.0 - pf) * m0;
        }
        case Metric::PAPE_BUDGET: {
            const auto f = assignments(rule, spec.p);
            return value_of(pop, f) - spec.p * m1 - (1.0 - spec.p) * m0;
        }
        case Metric::PAPD_BUDGET: {
            if (!spec.rule_g) throw InputError("PAPD needs a second rule");
            return value_of(pop, assignments(rule, spec.p)) -
                   value_of(pop, assignments(*spec.rule_g, spec.p));
        }
        case Metric::VALUE_DIFF: {
            if (!spec.rule_g) throw InputError("value difference needs a second rule");
            return value_of(pop, assignments(rule)) - value_of(pop, assignments(*spec.rule_g));
        }
        case Metric::AUPEC:
            return aupec_numerator(pop, rule.as_scoring()) - 0.5 * (m0 + m1);
        case Metric::AUPEC_NORM: {
            const double tau = m1 - m0;
            if (tau == 0.0) throw DegenerateDataError("normalized AUPEC undefined: zero ATE");
            return (aupec_numerator(pop, rule.as_scoring()) - m0) / tau - 0.5;
        }
    }
    throw InputError("unknown metric");
}

double true_qini(const PotentialPopulation& pop, std::span<const double> scores) {
    const std::size_t n = pop.n();
    const double nn = static_cast<double>(n);
    const auto order = rank_order(scores);
    double total_tau = 0.0;
    for (std::size_t i = 0; i < n; ++i) total_tau += pop.y1[i] - pop.y0[i];
    double integral = 0.0, top = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        const std::size_t i = order[k - 1];
        top += pop.y1[i] - pop.y0[i];
        // p * E(tau | top share p) at p = k/n
        integral += (static_cast<double>(k) / nn) * (top / static_cast<double>(k)) / nn;
    }
    return nn * (integral - 0.5 * total_tau / nn);
}

double binomial_coefficient(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    double c = 1.0;
    for (std::size_t j = 1; j <= k; ++j) c = c * static_cast<double>(n - k + j) / static_cast<double>(j);
    return std::round(c);
}

RandomizationDistribution enumerate_randomizations(const PotentialPopulation& pop, std::size_t n1,
                                                   const Estimator& estimator, unsigned threads) {
    pop.validate();
    const std::size_t n = pop.n();
    if (n1 > n) throw InputError("n1 exceeds n");
    const double count = binomial_coefficient(n, n1);
    if (count > kEnumerationGuard)
        throw SizeGuardError("C(" + std::to_string(n) + ", " + std::to_string(n1) +
                             ") assignments exceed the enumeration guard of 1e6");

    // Lexicographic combinations of treated positions.
    std::vector<std::vector<std::uint8_t>> assigns;
    assigns.reserve(static_cast<std::size_t>(count));
    std::vector<std::size_t> c(n1);
    for (std::size_t j = 0; j < n1; ++j) c[j] = j;
    while (true) {
        std::vector<std::uint8_t> t(n, 0);
        for (auto j : c) t[j] = 1;
        assigns.push_back(std::move(t));
        std::size_t j = n1;
        while (j > 0 && c[j - 1] == n - n1 + j - 1) --j;
        if (j == 0) break;
        ++c[j - 1];
        for (std::size_t l = j; l < n1; ++l) c[l] = c[l - 1] + 1;
    }

    RandomizationDistribution out;
    out.count = assigns.size();
    out.support.resize(assigns.size());
    parallel_for(assigns.size(), threads,
                 [&](std::size_t a) { out.support[a] = estimator(pop.observe(assigns[a])); });
    double s = 0.0;
    for (double v : out.support) s += v;
    out.mean = s / static_cast<double>(out.count);
    double ss = 0.0;
    for (double v : out.support) ss += (v - out.mean) * (v - out.mean);
    out.variance = ss / static_cast<double>(out.count);
    return out;
}

double sape_exact_variance(const PotentialPopulation& pop, std::span<const std::uint8_t> f,
                           std::size_t n1) {
    const std::size_t n = pop.n();
    const double nn = static_cast<double>(n);
    const double n1d = static_cast<double>(n1), n0d = nn - n1d;
    double pf = 0.0;
    for (auto v : f) pf += v;
    pf /= nn;
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = (f[i] - pf) * pop.y1[i];
        b[i] = (f[i] - pf) * pop.y0[i];
    }
    const double ma = mean(a), mb = mean(b);
    double s1 = 0, s0 = 0, s01 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        s1 += (a[i] - ma) * (a[i] - ma);
        s0 += (b[i] - mb) * (b[i] - mb);
        s01 += (a[i] - ma) * (b[i] - mb);
    }
    s1 /= nn - 1.0;
    s0 /= nn - 1.0;
    s01 /= nn - 1.0;
    return (n0d / n1d * s1 + n1d / n0d * s0 + 2.0 * s01) / nn;
}

}  // namespace itreval
