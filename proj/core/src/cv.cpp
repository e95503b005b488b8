#include "itreval/cv.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "itreval/errors.hpp"
#include "itreval/parallel.hpp"
#include "itreval/rng.hpp"

namespace itreval {

std::vector<std::size_t> FoldPlan::members(std::size_t k) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
        if (fold_of[i] == k) out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldPlan::complement(std::size_t k) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
        if (fold_of[i] != k) out.push_back(i);
    return out;
}

FoldPlan make_folds(const ExperimentData& data, std::size_t K, std::uint64_t seed) {
    if (K < 2) throw InputError("cross-validation needs K >= 2 folds");
    if (K > std::min(data.n1(), data.n0()))
        throw InputError("K = " + std::to_string(K) +
                         " exceeds the smaller arm size; every fold needs a treated and a control unit");
    std::vector<std::size_t> treated, control;
    for (std::size_t i = 0; i < data.n(); ++i) (data.t()[i] ? treated : control).push_back(i);
    auto eng = make_engine(seed, 0xf01d);
    std::shuffle(treated.begin(), treated.end(), eng);
    std::shuffle(control.begin(), control.end(), eng);

    FoldPlan plan;
    plan.K = K;
    plan.seed = seed;
    plan.fold_of.assign(data.n(), 0);
    plan.m.assign(K, 0);
    plan.m1.assign(K, 0);
    plan.m0.assign(K, 0);
    for (std::size_t j = 0; j < treated.size(); ++j) {
        const std::size_t k = j % K;
        plan.fold_of[treated[j]] = k;
        ++plan.m1[k];
    }
    // Controls continue the round robin so total sizes differ by at most one.
    for (std::size_t j = 0; j < control.size(); ++j) {
        const std::size_t k = (treated.size() + j) % K;
        plan.fold_of[control[j]] = k;
        ++plan.m0[k];
    }
    for (std::size_t k = 0; k < K; ++k) plan.m[k] = plan.m1[k] + plan.m0[k];
    plan.unequal = data.n() % K != 0;
    return plan;
}

std::vector<std::vector<std::uint8_t>> rule_agreement(const std::vector<std::vector<double>>& scores,
                                                       double c_star) {
    std::vector<std::vector<std::uint8_t>> f(scores.size());
    for (std::size_t k = 0; k < scores.size(); ++k) {
        f[k].resize(scores[k].size());
        for (std::size_t i = 0; i < scores[k].size(); ++i) f[k][i] = scores[k][i] > c_star;
    }
    return f;
}

double pair_covariance(const std::vector<std::vector<std::uint8_t>>& f, std::span<const double> a,
                       std::span<const double> b, std::span<const double> alpha,
                       std::span<const double> beta) {
    const std::size_t K = f.size();
    const std::size_t n = a.size();
    if (K == 0) return 0.0;
    const double kk = static_cast<double>(K);
    std::vector<double> F(n, 0.0);
    double within = 0.0;
    for (const auto& fk : f) {
        double sa = 0.0, sb = 0.0, sab = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!fk[i]) continue;
            sa += a[i];
            sb += b[i];
            sab += a[i] * b[i];
            F[i] += 1.0;
        }
        within += sa * sb - sab;
    }
    double saF = 0.0, sbF = 0.0, sabF = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        saF += a[i] * F[i];
        sbF += b[i] * F[i];
        sabF += a[i] * b[i] * F[i] * F[i];
    }
    const double numer = within / kk - (saF * sbF - sabF) / (kk * kk);
    double salpha = 0.0, sbeta = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        salpha += alpha[i];
        sbeta += beta[i];
        sab += alpha[i] * beta[i];
    }
    const double denom = salpha * sbeta - sab;
    return denom > 0.0 ? numer / denom : 0.0;
}

double pair_covariance_st(const std::vector<std::vector<std::uint8_t>>& f,
                          const ExperimentData& data, int s, int t) {
    const std::size_t n = data.n();
    std::vector<double> a(n), b(n), alpha(n), beta(n);
    for (std::size_t i = 0; i < n; ++i) {
        alpha[i] = data.t()[i] == s;
        beta[i] = data.t()[i] == t;
        a[i] = alpha[i] * data.y()[i];
        b[i] = beta[i] * data.y()[i];
    }
    return pair_covariance(f, a, b, alpha, beta);
}

namespace {

double mean_over_folds(const CvResult& r, const char* key) {
    double s = 0.0;
    for (const auto& e : r.per_fold) {
        auto it = e.diagnostics.find(key);
        if (it == e.diagnostics.end())
            throw DegenerateDataError(std::string("fold estimate lacks '") + key +
                                      "'; an arm has fewer than two units");
        s += it->second;
    }
    return s / static_cast<double>(r.per_fold.size());
}

// Average over folds of s2_arm1/m1 + s2_arm0/m0.
double marginal_mean(const CvResult& r) {
    double s = 0.0;
    for (std::size_t k = 0; k < r.per_fold.size(); ++k) {
        const auto& d = r.per_fold[k].diagnostics;
        if (!d.count(diag::kS2Arm1) || !d.count(diag::kS2Arm0))
            throw DegenerateDataError("fold " + std::to_string(k) +
                                      ": an arm has fewer than two units");
        s += d.at(diag::kS2Arm1) / static_cast<double>(r.plan.m1[k]) +
             d.at(diag::kS2Arm0) / static_cast<double>(r.plan.m0[k]);
    }
    return s / static_cast<double>(r.per_fold.size());
}

double finish(CvResult& r, double single) {
    const double kk = static_cast<double>(r.plan.K);
    const double es2 = std::min(r.s2_f, single);
    r.components["single_fold_variance"] = single;
    r.components["s2_f"] = r.s2_f;
    r.components["s2_f_used"] = es2;
    return single - (kk - 1.0) / kk * es2;
}

std::vector<double> column(const std::vector<double>& v, const std::vector<std::size_t>& idx) {
    std::vector<double> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(v[i]);
    return out;
}

}  // namespace

double cv_variance_pav(CvResult& r, const ExperimentData& data) {
    const auto f = rule_agreement(r.scores_all, r.spec.c_star);
    const double marg = marginal_mean(r);
    const double cov = pair_covariance_st(f, data, 1, 1) - pair_covariance_st(f, data, 1, 0) -
                       pair_covariance_st(f, data, 0, 1) + pair_covariance_st(f, data, 0, 0);
    r.components["marginal"] = marg;
    r.components["cov_tau_tau"] = cov;
    return finish(r, marg + cov);
}

double cv_variance_pape(CvResult& r, const ExperimentData& data) {
    const auto f = rule_agreement(r.scores_all, r.spec.c_star);
    const std::size_t n = data.n();
    const double m = static_cast<double>(n) / static_cast<double>(r.plan.K);
    const double marg = marginal_mean(r);
    const double pF = mean_over_folds(r, diag::kPfHat);
    const double tau = data.treated_mean() - data.control_mean();
    const double tF = r.pooled.point;

    std::vector<double> ones(n, 1.0), a1(n), t1(n), a0(n), t0(n);
    for (std::size_t i = 0; i < n; ++i) {
        t1[i] = data.t()[i];
        t0[i] = 1.0 - t1[i];
        a1[i] = t1[i] * data.y()[i];
        a0[i] = t0[i] * data.y()[i];
    }
    const double c_plain = pair_covariance(f, ones, ones, ones, ones);
    const double c_tt = pair_covariance_st(f, data, 1, 1) - pair_covariance_st(f, data, 1, 0) -
                        pair_covariance_st(f, data, 0, 1) + pair_covariance_st(f, data, 0, 0);
    const double c_t = pair_covariance(f, a1, ones, t1, ones) - pair_covariance(f, a0, ones, t0, ones);

    const double fixed = (tF * tF - m * pF * (1.0 - pF) * tau * tau +
                          2.0 * (m - 1.0) * (2.0 * pF - 1.0) * tau * tF) / (m * m);
    const double covs = ((m - 3.0) * (m - 2.0) * tau * tau * c_plain + (m * m - 2.0 * m + 2.0) * c_tt -
                         2.0 * (m - 2.0) * (m - 2.0) * tau * c_t) / (m * m);
    r.components["marginal"] = marg;
    r.components["p_F"] = pF;
    r.components["tau_hat"] = tau;
    r.components["cov_plain"] = c_plain;
    r.components["cov_tau_tau"] = c_tt;
    r.components["cov_tau"] = c_t;
    const double single = m * m / ((m - 1.0) * (m - 1.0)) * (marg + fixed + covs);
    return finish(r, single);
}

double cv_variance_pape_budget(CvResult& r) {
    const double p = r.spec.p;
    const double marg = marginal_mean(r);
    const double k1 = mean_over_folds(r, diag::kKappa1);
    const double k0 = mean_over_folds(r, diag::kKappa0);
    double c = 0.0;
    for (std::size_t k = 0; k < r.plan.K; ++k) {
        const double mm = static_cast<double>(r.plan.m[k]);
        const double b = static_cast<double>(budget_count(r.plan.m[k], p));
        c += b * (mm - b) / (mm * mm * (mm - 1.0));
    }
    c /= static_cast<double>(r.plan.K);
    r.components["marginal"] = marg;
    r.components["kappa_F1"] = k1;
    r.components["kappa_F0"] = k0;
    return finish(r, marg + c * ((2.0 * p - 1.0) * k1 * k1 - 2.0 * p * k1 * k0));
}

double cv_variance_papd_budget(CvResult& r) {
    const double p = r.spec.p;
    const double marg = marginal_mean(r);
    const double kf = mean_over_folds(r, diag::kKappa1);
    const double kg = mean_over_folds(r, diag::kKappaG1);
    double c1 = 0.0, c2 = 0.0;
    for (std::size_t k = 0; k < r.plan.K; ++k) {
        const double mm = static_cast<double>(r.plan.m[k]);
        const double b = static_cast<double>(budget_count(r.plan.m[k], p));
        c1 += b * (b - mm) / (mm * mm * (mm - 1.0));
        c2 += 2.0 * b * std::max(b, mm - b) / (mm * mm * (mm - 1.0));
    }
    c1 /= static_cast<double>(r.plan.K);
    c2 /= static_cast<double>(r.plan.K);
    r.components["marginal"] = marg;
    r.components["kappa_F1"] = kf;
    r.components["kappa_G1"] = kg;
    return finish(r, marg + c1 * (kf * kf + kg * kg) + c2 * std::fabs(kf * kg));
}

double cv_variance_aupec(CvResult& r) {
    const std::size_t K = r.plan.K;
    if (r.fold_profiles.size() != K) throw InputError("AUPEC variance needs per-fold kappa profiles");
    const std::size_t n = r.plan.fold_of.size();
    const std::size_t m = static_cast<std::size_t>(
        std::llround(static_cast<double>(n) / static_cast<double>(K)));
    const double marg = marginal_mean(r);
    const double pbar = mean_over_folds(r, diag::kPfHat);
    // Fold profiles are averaged on the common size-m grid; a fold of size
    // m_k contributes its value at the nearest z * m_k / m.
    std::vector<double> k1(m + 1, 0.0), k0(m + 1, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        const auto& prof = r.fold_profiles[k];
        const std::size_t mk = r.plan.m[k];
        for (std::size_t z = 0; z <= m; ++z) {
            std::size_t zk = z;
            if (mk != m)
                zk = static_cast<std::size_t>(std::llround(static_cast<double>(z * mk) /
                                                           static_cast<double>(m)));
            zk = std::min(zk, mk);
            k1[z] += prof.kappa1[zk] / static_cast<double>(K);
            k0[z] += prof.kappa0[zk] / static_cast<double>(K);
        }
    }
    ZMomentEngine engine(m, pbar, k1, k0, r.estimation.z);
    const auto zt = z_moment_terms(engine);
    const double mm = static_cast<double>(m);
    r.components["marginal"] = marg;
    r.components["p_F"] = pbar;
    r.components["z_expectation_term"] = zt.expectation_term;
    r.components["z_variance_term"] = zt.variance_term;
    return finish(r, marg + zt.expectation_term + zt.variance_term / (mm * mm));
}

namespace {

CvResult run_folds(const ExperimentData& data, const LearnerSpec& learner,
                   const CvMetricSpec& spec, std::size_t K, std::uint64_t seed,
                   const CvOptions& options) {
    if (spec.metric == Metric::PAPD_BUDGET && !spec.learner_g)
        throw InputError("PAPD cross-validation needs a second learner");
    if (spec.metric == Metric::AUPEC_NORM || spec.metric == Metric::VALUE_DIFF)
        throw InputError("metric is not supported under cross-validation");
    CvResult r;
    r.spec = spec;
    r.plan = make_folds(data, K, seed);
    r.estimation = options.estimation;
    r.per_fold.resize(K);
    r.scores_all.resize(K);
    if (spec.learner_g) r.scores_g_all.resize(K);
    if (spec.metric == Metric::AUPEC) r.fold_profiles.resize(K);

    parallel_for(K, options.threads, [&](std::size_t k) {
        const auto test_idx = r.plan.members(k);
        const auto train = data.subset(r.plan.complement(k));
        const auto test = data.subset(test_idx);
        try {
            r.scores_all[k] = fit(learner, train).score(data);
            const auto sk = column(r.scores_all[k], test_idx);
            MetricEstimate e;
            switch (spec.metric) {
                case Metric::PAV:
                    e = estimate_pav(test, Rule::scoring(sk, spec.c_star));
                    break;
                case Metric::PAPE:
                    e = estimate_pape(test, Rule::scoring(sk, spec.c_star));
                    break;
                case Metric::PAPE_BUDGET:
                    e = estimate_pape_budget(test, Rule::scoring(sk), spec.p);
                    break;
                case Metric::PAPD_BUDGET: {
                    r.scores_g_all[k] = fit(*spec.learner_g, train).score(data);
                    const auto gk = column(r.scores_g_all[k], test_idx);
                    e = estimate_papd_budget(test, Rule::scoring(sk), Rule::scoring(gk), spec.p);
                    break;
                }
                case Metric::AUPEC: {
                    EstimationOptions eo = options.estimation;
                    eo.z.seed = stream_key(options.estimation.z.seed, 0xa0, k);
                    e = estimate_aupec(test, Rule::scoring(sk, spec.c_star), eo).aupec;
                    r.fold_profiles[k] = kappa_profile(test, sk);
                    break;
                }
                default:
                    break;
            }
            r.per_fold[k] = std::move(e);
        } catch (const DegenerateDataError& ex) {
            throw DegenerateDataError("fold " + std::to_string(k) + ": " + ex.what());
        }
    });

    double sum = 0.0;
    for (const auto& e : r.per_fold) sum += e.point;
    const double kk = static_cast<double>(K);
    r.pooled.metric = spec.metric;
    r.pooled.point = sum / kk;
    r.pooled.n_used = data.n();
    double ss = 0.0, pt = 0.0;
    for (const auto& e : r.per_fold) {
        ss += (e.point - r.pooled.point) * (e.point - r.pooled.point);
        pt += e.proportion_treated;
    }
    r.s2_f = ss / (kk - 1.0);
    r.pooled.proportion_treated = pt / kk;
    if (r.plan.unequal) r.pooled.diagnostics["unequal_folds"] = 1.0;
    return r;
}

}  // namespace

CvResult crossval(const ExperimentData& data, const LearnerSpec& learner, const CvMetricSpec& spec,
                  std::size_t K, std::uint64_t seed, const CvOptions& options) {
    CvResult r = run_folds(data, learner, spec, K, seed, options);
    double v = 0.0;
    switch (spec.metric) {
        case Metric::PAV: v = cv_variance_pav(r, data); break;
        case Metric::PAPE: v = cv_variance_pape(r, data); break;
        case Metric::PAPE_BUDGET: v = cv_variance_pape_budget(r); break;
        case Metric::PAPD_BUDGET: v = cv_variance_papd_budget(r); break;
        case Metric::AUPEC: v = cv_variance_aupec(r); break;
        default: break;
    }
    for (const auto& [key, value] : r.components) r.pooled.diagnostics[key] = value;
    for (const auto& e : r.per_fold)
        if (e.flagged(diag::kKappaSubstituted)) r.pooled.diagnostics[diag::kKappaSubstituted] = 1.0;
    set_variance(r.pooled, v);
    return r;
}

CvResult cv_papd_budget(const ExperimentData& data, const LearnerSpec& learner_f,
                        const LearnerSpec& learner_g, double p, std::size_t K, std::uint64_t seed,
                        const CvOptions& options) {
    return crossval(data, learner_f, CvMetricSpec::papd_budget(p, learner_g), K, seed, options);
}

CvResult cv_aupec(const ExperimentData& data, const LearnerSpec& learner, double c_star,
                  std::size_t K, std::uint64_t seed, const CvOptions& options) {
    return crossval(data, learner, CvMetricSpec::aupec(c_star), K, seed, options);
}

}  // namespace itreval
