// Acceptance suite: one PASS/FAIL line per criterion. `--criterion N` runs one.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "itreval/cv.hpp"
#include "itreval/errors.hpp"
#include "itreval/metrics.hpp"
#include "itreval/oracle.hpp"
#include "itreval/sim.hpp"
#include "itreval/special.hpp"
#include "itreval/variance_kit.hpp"

using namespace itreval;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (pass) detail << "first failure: " << what << "; ";
            pass = false;
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool rel_close(double a, double b, double tol) {
    if (a == b) return true;
    return std::fabs(a - b) <= tol * std::max(std::fabs(a), std::fabs(b));
}

double rel_gap(double a, double b) {
    if (a == b) return 0.0;
    return std::fabs(a - b) / std::max(std::fabs(a), std::fabs(b));
}

std::vector<double> normals(std::mt19937_64& eng, std::size_t n, double mean = 0.0) {
    std::normal_distribution<double> norm(mean, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = norm(eng);
    return v;
}

// Shared by criteria 2-4: heterogeneous effects, continuous scores.
struct OraclePopulation {
    PotentialPopulation pop;
    std::size_t n1 = 0;
    std::vector<double> scores_g;
};

std::vector<OraclePopulation> oracle_populations() {
    std::vector<OraclePopulation> out;
    std::mt19937_64 eng(20240601);
    const std::size_t sizes[3] = {6, 8, 10};
    for (std::size_t i = 0; i < 60; ++i) {
        const std::size_t n = sizes[i % 3];
        OraclePopulation op;
        op.n1 = n / 2 - (i / 3) % 2;
        op.pop.y0 = normals(eng, n);
        const auto tau = normals(eng, n, 0.5);
        for (std::size_t j = 0; j < n; ++j) op.pop.y1.push_back(op.pop.y0[j] + tau[j]);
        op.pop.scores = normals(eng, n);
        op.scores_g = normals(eng, n);
        out.push_back(std::move(op));
    }
    return out;
}

double sample_var(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return ss / static_cast<double>(v.size() - 1);
}

// Variance of the budgeted PAPE estimator with every unknown replaced by its
// population value: S^2 of (f - p) Y(t) over the n units and kappa_t as the
// mean effect within each group of the rule.
double plugin_budget_variance(const PotentialPopulation& pop, const Assignment& f, double p,
                         std::size_t n1) {
    const std::size_t n = pop.n();
    std::vector<double> a(n), c(n);
    double k1 = 0.0, k0 = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = (f[i] - p) * pop.y1[i];
        c[i] = (f[i] - p) * pop.y0[i];
        const double tau = pop.y1[i] - pop.y0[i];
        if (f[i]) {
            k1 += tau;
            ++k;
        } else {
            k0 += tau;
        }
    }
    k1 = k ? k1 / static_cast<double>(k) : 0.0;
    k0 = k < n ? k0 / static_cast<double>(n - k) : 0.0;
    const double nn = static_cast<double>(n), kk = static_cast<double>(k);
    const double n0 = static_cast<double>(n - n1);
    return sample_var(a) / static_cast<double>(n1) + sample_var(c) / n0 +
           kk * (nn - kk) / (nn * nn * (nn - 1.0)) * ((2.0 * p - 1.0) * k1 * k1 - 2.0 * p * k1 * k0);
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
    Outcome o;
    const auto d = ExperimentData::create({2, 3, -1, 1, 3}, {1, 1, 0, 0, 1});
    const auto rule = Rule::fixed({1, 0, 0, 1, 0});
    const auto t0 = Clock::now();
    const double pav = estimate_pav(d, rule).point;
    std::vector<double> shifted = d.y();
    for (auto& y : shifted) y += 1.0;
    const double pav1 = estimate_pav(d.with_outcomes(shifted), rule).point;
    const double ms = 1e3 * seconds_since(t0);
    o.require(std::fabs(pav - 1.0 / 6.0) <= 1e-12, "PAV != 1/6");
    o.require(std::fabs(pav1 - 1.0) <= 1e-12, "shifted PAV != 1");
    o.require(std::fabs((pav1 - pav) - 5.0 / 6.0) <= 1e-12, "difference != 5/6");
    o.require(ms < 1.0, "runtime >= 1 ms");
    o.detail << "PAV=" << pav << " shifted=" << pav1 << " runtime=" << ms << "ms";
    return o;
}

Outcome criterion2() {
    Outcome o;
    const auto t0 = Clock::now();
    const auto pops = oracle_populations();
    double worst_pav = 0.0, worst_sape = 0.0;
    for (const auto& op : pops) {
        const auto f = Rule::scoring(op.pop.scores, 0.0);
        const double n = static_cast<double>(op.pop.n());
        const auto pav = enumerate_randomizations(op.pop, op.n1, [&](const ExperimentData& d) {
            return estimate_pav(d, f).point;
        });
        const auto sape = enumerate_randomizations(op.pop, op.n1, [&](const ExperimentData& d) {
            return (n - 1.0) / n * estimate_pape(d, f).point;
        });
        worst_pav = std::max(worst_pav, std::fabs(pav.mean - true_metric(op.pop, f, {Metric::PAV})));
        worst_sape = std::max(worst_sape, std::fabs(sape.mean - true_metric(op.pop, f, {Metric::PAPE})));
    }
    const double s = seconds_since(t0);
    o.require(worst_pav <= 1e-12, "PAV mean differs from the population value");
    o.require(worst_sape <= 1e-12, "SAPE estimator mean differs from the SAPE");
    o.require(s < 10.0, "runtime >= 10 s");
    o.detail << pops.size() << " populations, max|PAV bias|=" << worst_pav
             << " max|SAPE bias|=" << worst_sape << " runtime=" << s << "s";
    return o;
}

Outcome criterion3() {
    Outcome o;
    const auto pops = oracle_populations();
    const double p = 0.5;
    double worst_closed = 0.0, worst_budget = 0.0, worst_const = 0.0, worst_group = 0.0;
    for (const auto& op : pops) {
        const auto f = Rule::scoring(op.pop.scores, 0.0);
        const auto fa = assignments(f);
        const double n = static_cast<double>(op.pop.n());
        const auto sape = enumerate_randomizations(op.pop, op.n1, [&](const ExperimentData& d) {
            return (n - 1.0) / n * estimate_pape(d, f).point;
        });
        worst_closed = std::max(worst_closed, rel_gap(sape.variance, sape_exact_variance(op.pop, fa, op.n1)));

        const auto rule = Rule::scoring(op.pop.scores);
        const auto fb = assignments(rule, p);
        auto budget_var = [&](const PotentialPopulation& pop) {
            return enumerate_randomizations(pop, op.n1, [&](const ExperimentData& d) {
                       return estimate_pape_budget(d, rule, p).point;
                   }).variance;
        };
        worst_budget = std::max(worst_budget, rel_gap(plugin_budget_variance(op.pop, fb, p, op.n1), budget_var(op.pop)));

        // Diagnostics on derived populations with the same y0 and scores.
        double tbar = 0.0, g1 = 0.0, g0 = 0.0;
        std::size_t k = 0;
        for (std::size_t i = 0; i < op.pop.n(); ++i) {
            const double tau = op.pop.y1[i] - op.pop.y0[i];
            tbar += tau / n;
            if (fb[i]) {
                g1 += tau;
                ++k;
            } else {
                g0 += tau;
            }
        }
        g1 /= static_cast<double>(k);
        g0 /= n - static_cast<double>(k);
        PotentialPopulation cpop = op.pop, gpop = op.pop;
        std::vector<double> gtau(op.pop.n());
        for (std::size_t i = 0; i < op.pop.n(); ++i) {
            cpop.y1[i] = op.pop.y0[i] + tbar;
            gtau[i] = fb[i] ? g1 : g0;
            gpop.y1[i] = op.pop.y0[i] + gtau[i];
        }
        worst_const = std::max(worst_const, rel_gap(plugin_budget_variance(cpop, fb, p, op.n1), budget_var(cpop)));
        worst_group = std::max(worst_group, rel_gap(plugin_budget_variance(gpop, fb, p, op.n1),
                                                    budget_var(gpop) + p * p * sample_var(gtau) / n));
    }
    o.require(worst_closed <= 1e-10, "SAPE closed form differs from the enumerated variance");
    o.require(worst_budget <= 1e-8, "plug-in budget variance differs from the enumerated budget-PAPE variance");
    o.detail << "max rel gap: sape closed form=" << worst_closed << " budget plug-in=" << worst_budget
             << " [constant-effect=" << worst_const << " group-constant+p^2 S_tau^2/n=" << worst_group
             << "]";
    return o;
}

Outcome criterion4() {
    Outcome o;
    const auto pops = oracle_populations();
    std::vector<double> grid;
    for (int j = 0; j < 10; ++j) grid.push_back(std::pow(10.0, -3.0 + j / 3.0));
    const double p = 0.5;
    EstimationOptions cheap;
    cheap.z.draws = 16;
    std::size_t checks = 0;
    double worst_bias = 0.0;
    for (const auto& op : pops) {
        const std::size_t n = op.pop.n();
        double cap = 0.0;
        for (std::size_t i = 0; i < n; ++i) cap = std::max(cap, std::fabs(op.pop.y1[i] - op.pop.y0[i]));
        const auto f = Rule::scoring(op.pop.scores);
        const auto g = Rule::scoring(op.scores_g);
        const auto fc = Rule::scoring(op.pop.scores, 0.0);

        const double b_budget =
            enumerate_randomizations(op.pop, op.n1, [&](const ExperimentData& d) {
                return estimate_pape_budget(d, f, p).point;
            }).mean - true_metric(op.pop, f, {Metric::PAPE_BUDGET, p});
        const double b_papd =
            enumerate_randomizations(op.pop, op.n1, [&](const ExperimentData& d) {
                return estimate_papd_budget(d, f, g, p).point;
            }).mean - true_metric(op.pop, f, {Metric::PAPD_BUDGET, p, g});
        const double b_aupec =
            enumerate_randomizations(op.pop, op.n1, [&](const ExperimentData& d) {
                return estimate_aupec(d, fc, cheap).aupec.point;
            }).mean - true_metric(op.pop, fc, {Metric::AUPEC});
        const auto fa = assignments(fc);
        const double p_f = static_cast<double>(std::count(fa.begin(), fa.end(), 1)) / static_cast<double>(n);
        worst_bias = std::max({worst_bias, std::fabs(b_budget), std::fabs(b_papd), std::fabs(b_aupec)});

        for (double eps : grid) {
            const double bounds[3] = {bias_bound_pape_budget(n, p, eps, cap).probability_bound,
                                      bias_bound_papd(n, p, eps, cap).probability_bound,
                                      bias_bound_aupec(n, p_f, eps, cap).probability_bound};
            const double biases[3] = {b_budget, b_papd, b_aupec};
            for (int m = 0; m < 3; ++m) {
                const double prob = std::fabs(biases[m]) >= eps ? 1.0 : 0.0;
                o.require(bounds[m] >= 0.0 && bounds[m] <= 1.0, "bound outside [0, 1]");
                o.require(prob <= bounds[m], "P(|bias| >= eps) exceeds the bound");
                ++checks;
            }
        }
    }
    o.detail << checks << " (population, metric, eps) checks, max|conditional bias|=" << worst_bias;
    return o;
}

Outcome coverage_criterion(const std::string& tag, const DgpConfig& base, const StudyMode& mode,
                           const std::vector<SimMetric>& metrics, double lo, double hi, double limit_s) {
    Outcome o;
    const auto t0 = Clock::now();
    std::size_t outside_93_97 = 0;
    for (double xi : {1.0 / 3.0, 2.0}) {
        DgpConfig c = base;
        c.xi = xi;
        const auto rep = coverage_study(c, metrics, mode);
        o.detail << rep.scenario << ":";
        for (const auto& m : rep.metrics) {
            o.detail << ' ' << m.label << '=' << 100.0 * m.coverage << '%';
            o.require(m.coverage >= lo && m.coverage <= hi, rep.scenario + " " + m.label + " coverage outside band");
            if (m.coverage < 0.93 || m.coverage > 0.97) ++outside_93_97;
        }
        o.detail << "; ";
    }
    const double s = seconds_since(t0);
    o.require(s <= limit_s, tag + " runtime over limit");
    o.detail << "band=[" << 100.0 * lo << "%, " << 100.0 * hi << "%], cells outside 93-97%: " << outside_93_97
             << ", runtime=" << s << "s";
    return o;
}

Outcome criterion5() {
    DgpConfig c;
    c.n = 100;
    c.trials = 1000;
    c.seed = 0;
    const std::vector<SimMetric> ms{{Metric::PAPE, 0.0},
                                    {Metric::PAPE_BUDGET, 0.2},
                                    {Metric::AUPEC, 0.0},
                                    {Metric::PAPD_BUDGET, 0.2}};
    return coverage_criterion("fixed", c, FixedRuleMode{}, ms, 0.925, 0.975, 600.0);
}

Outcome criterion6() {
    Outcome o;
    // Equality of cv points with fold averages of fixed-rule estimates.
    std::mt19937_64 eng(77);
    std::size_t cases = 0;
    for (std::size_t rep = 0; rep < 5; ++rep) {
        const std::size_t n = 80, K = 5;
        std::vector<std::uint8_t> t(n, 0);
        std::fill(t.begin(), t.begin() + n / 2, 1);
        std::shuffle(t.begin(), t.end(), eng);
        auto y = normals(eng, n);
        for (std::size_t i = 0; i < n; ++i) y[i] += 0.3 * t[i];
        const auto d = ExperimentData::create(y, t);
        const auto sf = normals(eng, n), sg = normals(eng, n);
        const LearnerSpec lf{ConstantScorer{sf}}, lg{ConstantScorer{sg}};
        const std::uint64_t seed = 100 + rep;
        const auto plan = make_folds(d, K, seed);
        auto fold_mean = [&](auto estimator) {
            double s = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                const auto idx = plan.members(k);
                std::vector<double> fk, gk;
                for (auto i : idx) {
                    fk.push_back(sf[i]);
                    gk.push_back(sg[i]);
                }
                s += estimator(d.subset(idx), fk, gk);
            }
            return s / static_cast<double>(K);
        };
        const double pairs[5][2] = {
            {crossval(d, lf, CvMetricSpec::pav(0.0), K, seed).pooled.point,
             fold_mean([](const ExperimentData& dk, auto& fk, auto&) {
                 return estimate_pav(dk, Rule::scoring(fk, 0.0)).point;
             })},
            {crossval(d, lf, CvMetricSpec::pape(0.0), K, seed).pooled.point,
             fold_mean([](const ExperimentData& dk, auto& fk, auto&) {
                 return estimate_pape(dk, Rule::scoring(fk, 0.0)).point;
             })},
            {crossval(d, lf, CvMetricSpec::pape_budget(0.2), K, seed).pooled.point,
             fold_mean([](const ExperimentData& dk, auto& fk, auto&) {
                 return estimate_pape_budget(dk, Rule::scoring(fk), 0.2).point;
             })},
            {cv_papd_budget(d, lf, lg, 0.2, K, seed).pooled.point,
             fold_mean([](const ExperimentData& dk, auto& fk, auto& gk) {
                 return estimate_papd_budget(dk, Rule::scoring(fk), Rule::scoring(gk), 0.2).point;
             })},
            {cv_aupec(d, lf, 0.0, K, seed).pooled.point,
             fold_mean([](const ExperimentData& dk, auto& fk, auto&) {
                 return estimate_aupec(dk, Rule::scoring(fk, 0.0)).aupec.point;
             })},
        };
        for (const auto& pr : pairs) {
            o.require(pr[0] == pr[1], "cv point differs from the fold average");
            ++cases;
        }
    }
    o.detail << cases << " exact cv equalities; ";

    DgpConfig c;
    c.n = 500;
    c.trials = 500;
    c.seed = 0;
    const std::vector<SimMetric> ms{{Metric::PAPE, 0.0}, {Metric::PAPE_BUDGET, 0.2}};
    Outcome cov = coverage_criterion("crossval", c, CrossvalMode{}, ms, 0.93, 1.0, 900.0);
    o.require(cov.pass, cov.detail.str());
    o.detail << cov.detail.str();
    return o;
}

// (1/n) sum_k [mean over treated top-k of y + mean over control outside top-k of y]
// minus the average of the two arm means, summed directly.
double direct_qini(const ExperimentData& d, const std::vector<double>& scores) {
    const std::size_t n = d.n();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    std::vector<bool> top(n, false);
    const double n1 = static_cast<double>(d.n1()), n0 = static_cast<double>(d.n0());
    double total = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        top[order[k - 1]] = true;
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (d.t()[i] && top[i]) v += d.y()[i] / n1;
            if (!d.t()[i] && !top[i]) v += d.y()[i] / n0;
        }
        total += v;
    }
    double m1 = 0.0, m0 = 0.0;
    for (std::size_t i = 0; i < n; ++i) (d.t()[i] ? m1 : m0) += d.y()[i];
    return total / static_cast<double>(n) - 0.5 * (m1 / n1 + m0 / n0);
}

Outcome criterion7() {
    Outcome o;
    std::mt19937_64 eng(4242);
    std::uniform_int_distribution<std::size_t> size(8, 120);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = size(eng);
        std::vector<std::uint8_t> t(n, 0);
        std::fill(t.begin(), t.begin() + n / 2, 1);
        std::shuffle(t.begin(), t.end(), eng);
        auto y = normals(eng, n, 1.0);
        const auto s = normals(eng, n);
        const auto d = ExperimentData::create(y, t);
        const double est = estimate_aupec(d, Rule::scoring(s)).aupec.point;
        const double direct = direct_qini(d, s);
        worst = std::max(worst, rel_gap(est, direct));
        o.require(rel_close(est, direct, 1e-10), "AUPEC differs from the direct QINI sum");
    }
    o.detail << "100 datasets, max rel gap=" << worst;
    return o;
}

Outcome criterion8() {
    Outcome o;
    std::mt19937_64 eng(8);
    std::size_t checks = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 12 + 3 * (rep % 7);
        PotentialPopulation pop;
        pop.y0 = normals(eng, n);
        pop.y1 = normals(eng, n, 0.7);
        pop.scores = normals(eng, n);
        const double c_star = rep % 2 ? 0.0 : -INFINITY;
        const auto r = Rule::scoring(pop.scores, c_star);
        PotentialPopulation shifted = pop, affine = pop;
        for (std::size_t i = 0; i < n; ++i) {
            shifted.y0[i] += 2.5;
            shifted.y1[i] += 2.5;
            affine.y0[i] = 3.0 * pop.y0[i] - 1.0;
            affine.y1[i] = 3.0 * pop.y1[i] - 1.0;
        }
        o.require(std::fabs(true_metric(shifted, r, {Metric::AUPEC}) - true_metric(pop, r, {Metric::AUPEC})) <= 1e-12,
                  "population AUPEC not shift invariant");
        o.require(std::fabs(true_metric(affine, r, {Metric::AUPEC_NORM}) -
                            true_metric(pop, r, {Metric::AUPEC_NORM})) <= 1e-12,
                  "normalized AUPEC not affine invariant");

        std::vector<std::uint8_t> t(n, 0);
        std::fill(t.begin(), t.begin() + n / 2, 1);
        std::shuffle(t.begin(), t.end(), eng);
        const auto d = pop.observe(t);
        o.require(estimate_pape(d, Rule::fixed(Assignment(n, 0))).point == 0.0, "PAPE(f=0) != 0");
        o.require(estimate_pape(d, Rule::fixed(Assignment(n, 1))).point == 0.0, "PAPE(f=1) != 0");
        o.require(true_metric(pop, Rule::fixed(Assignment(n, 0)), {Metric::PAPE}) == 0.0, "true PAPE(f=0) != 0");
        o.require(true_metric(pop, Rule::fixed(Assignment(n, 1)), {Metric::PAPE}) == 0.0, "true PAPE(f=1) != 0");

        const auto f = Rule::scoring(pop.scores);
        const auto g = Rule::scoring(normals(eng, n));
        for (double p : {0.1, 0.25, 0.5, 0.8}) {
            o.require(estimate_papd_budget(d, f, g, p).point == -estimate_papd_budget(d, g, f, p).point,
                      "PAPD not antisymmetric");
        }
        Assignment prev(n, 0);
        for (std::size_t k = 0; k <= n; ++k) {
            const auto cur = assignments(f, static_cast<double>(k) / static_cast<double>(n));
            for (std::size_t i = 0; i < n; ++i) o.require(prev[i] <= cur[i], "treated sets not nested");
            prev = cur;
        }
        checks += 7;
    }
    std::uniform_real_distribution<double> u(0.0, 1.0), ab(0.1, 30.0);
    for (int rep = 0; rep < 500; ++rep) {
        const double x = u(eng), a = ab(eng), b = ab(eng);
        o.require(std::fabs(reg_inc_beta(x, a, b) - (1.0 - reg_inc_beta(1.0 - x, b, a))) <= 1e-12,
                  "incomplete beta reflection");
        ++checks;
    }
    o.detail << checks << " invariance checks";
    return o;
}

double literal_pair_covariance(const std::vector<std::vector<std::uint8_t>>& f, const std::vector<double>& a,
                               const std::vector<double>& b, const std::vector<double>& alpha,
                               const std::vector<double>& beta) {
    const std::size_t K = f.size(), n = a.size();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            double both = 0.0, fi = 0.0, fj = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
                both += f[k][i] * f[k][j];
                fi += f[k][i];
                fj += f[k][j];
            }
            num += a[i] * b[j] * (both / K - (fi / K) * (fj / K));
            den += alpha[i] * beta[j];
        }
    return num / den;
}

Outcome criterion9() {
    Outcome o;
    std::mt19937_64 eng(99);
    std::uniform_int_distribution<std::size_t> size(10, 200), folds(2, 5);
    std::bernoulli_distribution coin(0.5);
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = size(eng), K = folds(eng);
        std::vector<std::vector<double>> scores;
        for (std::size_t k = 0; k < K; ++k) scores.push_back(normals(eng, n));
        const auto f = rule_agreement(scores, 0.0);
        const auto a = normals(eng, n), b = normals(eng, n);
        std::vector<double> alpha(n), beta(n);
        for (std::size_t i = 0; i < n; ++i) {
            alpha[i] = coin(eng) ? 1.0 : 0.0;
            beta[i] = 1.0 - alpha[i];
        }
        const double fast = pair_covariance(f, a, b, alpha, beta);
        const double slow = literal_pair_covariance(f, a, b, alpha, beta);
        worst = std::max(worst, rel_gap(fast, slow));
        o.require(rel_close(fast, slow, 1e-10), "O(nK) covariance differs from the double loop");
    }
    o.detail << "20 instances, max rel gap=" << worst;
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3,
                                                           criterion4, criterion5, criterion6,
                                                           criterion7, criterion8, criterion9};
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--criterion" && i + 1 < argc) only = std::atoi(argv[++i]);
    }
    if (only < 0 || only > static_cast<int>(criteria.size())) {
        std::cerr << "unknown criterion " << only << '\n';
        return 2;
    }
    bool all = true;
    for (std::size_t c = 0; c < criteria.size(); ++c) {
        if (only && static_cast<int>(c + 1) != only) continue;
        Outcome o;
        try {
            o = criteria[c]();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        all = all && o.pass;
        std::cout << "criterion " << c + 1 << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail.str()
                  << std::endl;
    }
    return all ? 0 : 1;
}
