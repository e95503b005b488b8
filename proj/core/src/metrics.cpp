#include "itreval/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "itreval/errors.hpp"

namespace itreval {

std::string_view metric_name(Metric m) {
    switch (m) {
        case Metric::PAV: return "PAV";
        case Metric::PAPE: return "PAPE";
        case Metric::PAPE_BUDGET: return "PAPE_BUDGET";
        case Metric::PAPD_BUDGET: return "PAPD_BUDGET";
        case Metric::AUPEC: return "AUPEC";
        case Metric::AUPEC_NORM: return "AUPEC_NORM";
        case Metric::VALUE_DIFF: return "VALUE_DIFF";
    }
    return "UNKNOWN";
}

void set_variance(MetricEstimate& est, double variance) {
    if (!(variance >= 0.0)) {
        est.diagnostics[diag::kVarianceClamped] = 1.0;
        variance = 0.0;
    }
    est.std_error = std::sqrt(variance);
}

namespace {

void require_arms(const ExperimentData& data) {
    if (data.n1() == 0 || data.n0() == 0)
        throw DegenerateDataError("both arms need at least one unit");
}

void check_length(const ExperimentData& data, const Rule& rule) {
    if (rule.size() != data.n()) throw InputError("rule length does not match data");
}

double mean_of(std::span<const std::uint8_t> f) {
    double s = 0.0;
    for (auto v : f) s += v;
    return f.empty() ? 0.0 : s / static_cast<double>(f.size());
}

// Within-arm variances of `values`, stored in diagnostics; returns their
// contribution s2_1/n1 + s2_0/n0, or nullopt if an arm is too small.
std::optional<double> marginal_terms(const ExperimentData& data, std::span<const double> values,
                                     MetricEstimate& est) {
    auto s1 = arm_variance(data, values, 1);
    auto s0 = arm_variance(data, values, 0);
    if (!s1 || !s0) return std::nullopt;
    est.diagnostics[diag::kS2Arm1] = *s1;
    est.diagnostics[diag::kS2Arm0] = *s0;
    return *s1 / static_cast<double>(data.n1()) + *s0 / static_cast<double>(data.n0());
}

double budget_kappa_term(std::size_t n, std::size_t k, double p, double k1, double k0) {
    const double nn = static_cast<double>(n), kk = static_cast<double>(k);
    return kk * (nn - kk) / (nn * nn * (nn - 1.0)) * ((2.0 * p - 1.0) * k1 * k1 - 2.0 * p * k1 * k0);
}

}  // namespace

MetricEstimate estimate_pav(const ExperimentData& data, const Rule& rule) {
    require_arms(data);
    check_length(data, rule);
    const Assignment f = assignments(rule);
    std::vector<double> yf(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) yf[i] = (f[i] == data.t()[i]) ? data.y()[i] : 0.0;

    MetricEstimate est;
    est.metric = Metric::PAV;
    est.n_used = data.n();
    est.proportion_treated = mean_of(f);
    est.diagnostics[diag::kPfHat] = est.proportion_treated;
    est.point = arm_mean(data, yf, 1) + arm_mean(data, yf, 0);
    if (auto v = marginal_terms(data, yf, est)) set_variance(est, *v);
    return est;
}

MetricEstimate estimate_pape(const ExperimentData& data, const Rule& rule) {
    require_arms(data);
    check_length(data, rule);
    const std::size_t n = data.n();
    if (n < 2) throw InputError("PAPE needs n >= 2");
    const Assignment f = assignments(rule);
    const double nn = static_cast<double>(n);
    const double p = mean_of(f);
    std::vector<double> yf(n), yt(n);
    for (std::size_t i = 0; i < n; ++i) {
        yf[i] = (f[i] == data.t()[i]) ? data.y()[i] : 0.0;
        yt[i] = (static_cast<double>(f[i]) - p) * data.y()[i];
    }
    const double m1 = arm_mean(data, data.y(), 1), m0 = arm_mean(data, data.y(), 0);
    const double value = arm_mean(data, yf, 1) + arm_mean(data, yf, 0);
    const double c = nn / (nn - 1.0);

    MetricEstimate est;
    est.metric = Metric::PAPE;
    est.n_used = n;
    est.proportion_treated = p;
    est.point = c * (value - p * m1 - (1.0 - p) * m0);
    const double tau = m1 - m0;
    est.diagnostics[diag::kPfHat] = p;
    est.diagnostics[diag::kTauHat] = tau;
    if (auto v = marginal_terms(data, yt, est)) {
        const double tf = est.point;
        const double extra =
            (tf * tf - nn * p * (1.0 - p) * tau * tau + 2.0 * (nn - 1.0) * (2.0 * p - 1.0) * tf * tau) /
            (nn * nn);
        est.diagnostics[diag::kCovTerm] = c * c * extra;
        set_variance(est, c * c * (*v + extra));
    }
    return est;
}

MetricEstimate estimate_pape_budget(const ExperimentData& data, const Rule& rule, double p) {
    require_arms(data);
    check_length(data, rule);
    const std::size_t n = data.n();
    if (n < 2) throw InputError("PAPE needs n >= 2");
    const auto thr = threshold_for_budget(rule, p);
    const Assignment& f = thr.treated;
    std::vector<double> yf(n), yt(n);
    for (std::size_t i = 0; i < n; ++i) {
        yf[i] = (f[i] == data.t()[i]) ? data.y()[i] : 0.0;
        yt[i] = (static_cast<double>(f[i]) - p) * data.y()[i];
    }
    const double m1 = arm_mean(data, data.y(), 1), m0 = arm_mean(data, data.y(), 0);

    MetricEstimate est;
    est.metric = Metric::PAPE_BUDGET;
    est.n_used = n;
    est.proportion_treated = p;
    est.point = arm_mean(data, yf, 1) + arm_mean(data, yf, 0) - p * m1 - (1.0 - p) * m0;
    est.diagnostics[diag::kBudgetCount] = static_cast<double>(thr.k);
    est.diagnostics[diag::kTauHat] = m1 - m0;

    const auto kp = kappa_profile(data, rule.as_scoring().scores);
    const double k1 = kp.kappa1[thr.k], k0 = kp.kappa0[thr.k];
    est.diagnostics[diag::kKappa1] = k1;
    est.diagnostics[diag::kKappa0] = k0;
    if (kp.substituted1(thr.k) || kp.substituted0(thr.k))
        est.diagnostics[diag::kKappaSubstituted] = 1.0;
    if (auto v = marginal_terms(data, yt, est)) {
        const double cov = budget_kappa_term(n, thr.k, p, k1, k0);
        est.diagnostics[diag::kCovTerm] = cov;
        set_variance(est, *v + cov);
    }
    return est;
}

MetricEstimate estimate_papd_budget(const ExperimentData& data, const Rule& rule_f,
                                    const Rule& rule_g, double p) {
    require_arms(data);
    check_length(data, rule_f);
    check_length(data, rule_g);
    const std::size_t n = data.n();
    if (n < 2) throw InputError("PAPD needs n >= 2");
    const auto tf = threshold_for_budget(rule_f, p);
    const auto tg = threshold_for_budget(rule_g, p);
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i)
        d[i] = (static_cast<double>(tf.treated[i]) - static_cast<double>(tg.treated[i])) * data.y()[i];

    MetricEstimate est;
    est.metric = Metric::PAPD_BUDGET;
    est.n_used = n;
    est.proportion_treated = p;
    est.point = arm_mean(data, d, 1) - arm_mean(data, d, 0);
    est.diagnostics[diag::kBudgetCount] = static_cast<double>(tf.k);

    const auto kf = kappa_profile(data, rule_f.as_scoring().scores);
    const auto kg = kappa_profile(data, rule_g.as_scoring().scores);
    const double kf1 = kf.kappa1[tf.k], kg1 = kg.kappa1[tg.k];
    est.diagnostics[diag::kKappa1] = kf1;
    est.diagnostics[diag::kKappaG1] = kg1;
    if (kf.substituted1(tf.k) || kg.substituted1(tg.k))
        est.diagnostics[diag::kKappaSubstituted] = 1.0;
    if (auto v = marginal_terms(data, d, est)) {
        const double nn = static_cast<double>(n), kk = static_cast<double>(tf.k);
        const double cov = kk * (kk - nn) / (nn * nn * (nn - 1.0)) * (kf1 * kf1 + kg1 * kg1) +
                           2.0 * papd_cov_bound(n, p, kf1, kg1);
        est.diagnostics[diag::kCovTerm] = cov;
        set_variance(est, *v + cov);
    }
    return est;
}

MetricEstimate value_difference(const ExperimentData& data, const Rule& rule_f,
                                const Rule& rule_g) {
    const auto ef = estimate_pav(data, rule_f);
    const auto eg = estimate_pav(data, rule_g);
    const Assignment f = assignments(rule_f), g = assignments(rule_g);
    std::vector<double> v(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) {
        const double af = f[i] == data.t()[i], ag = g[i] == data.t()[i];
        v[i] = (af - ag) * data.y()[i];
    }
    MetricEstimate est;
    est.metric = Metric::VALUE_DIFF;
    est.n_used = data.n();
    est.proportion_treated = ef.proportion_treated;
    est.point = ef.point - eg.point;
    if (auto var = marginal_terms(data, v, est)) set_variance(est, *var);
    return est;
}

std::vector<double> aupec_weights(std::span<const double> scores, std::size_t n_f) {
    const std::size_t n = scores.size();
    const auto r = ranks(scores);
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        // sum over k = 1..n_f of 1{r_i <= k}, plus the plateau at p_f-hat
        const double ramp = r[i] <= n_f ? static_cast<double>(n_f - r[i] + 1) : 0.0;
        const double plateau = r[i] <= n_f ? static_cast<double>(n - n_f) : 0.0;
        w[i] = (ramp + plateau) / static_cast<double>(n);
    }
    return w;
}

namespace {

struct AupecCore {
    MetricEstimate est;
    std::vector<double> ystar;
};

AupecCore aupec_core(const ExperimentData& data, const Rule& rule, const EstimationOptions& opt) {
    require_arms(data);
    check_length(data, rule);
    const std::size_t n = data.n();
    if (n < 2) throw InputError("AUPEC needs n >= 2");
    const auto& sc = rule.as_scoring();
    std::size_t n_f = 0;
    for (double s : sc.scores) n_f += s > sc.floor_threshold;
    const auto w = aupec_weights(sc.scores, n_f);
    const double nn = static_cast<double>(n);
    const double pf = static_cast<double>(n_f) / nn;

    std::vector<double> yw(n), ycw(n), ystar(n);
    for (std::size_t i = 0; i < n; ++i) {
        yw[i] = w[i] * data.y()[i];
        ycw[i] = (1.0 - w[i]) * data.y()[i];
        ystar[i] = (w[i] - 0.5) * data.y()[i];
    }
    const double m1 = arm_mean(data, data.y(), 1), m0 = arm_mean(data, data.y(), 0);

    AupecCore core;
    auto& est = core.est;
    est.metric = Metric::AUPEC;
    est.n_used = n;
    est.proportion_treated = pf;
    est.point = arm_mean(data, yw, 1) + arm_mean(data, ycw, 0) - 0.5 * m1 - 0.5 * m0;
    est.diagnostics[diag::kPfHat] = pf;
    est.diagnostics[diag::kTauHat] = m1 - m0;

    if (auto v = marginal_terms(data, ystar, est)) {
        const auto kp = kappa_profile(data, sc.scores);
        if (kp.z_min > 1 || kp.z_max < n - 1) est.diagnostics[diag::kKappaSubstituted] = 1.0;
        ZMomentEngine engine(n, pf, kp.kappa1, kp.kappa0, opt.z);
        const auto zt = z_moment_terms(engine);
        est.diagnostics[diag::kZExpectation] = zt.expectation_term;
        est.diagnostics[diag::kZVariance] = zt.variance_term;
        // The Z-variance term enters on the scale of the per-unit weights,
        // which carry a 1/n relative to the displayed sum.
        const double cov = zt.expectation_term + zt.variance_term / (nn * nn);
        est.diagnostics[diag::kCovTerm] = cov;
        set_variance(est, *v + cov);
    }
    core.ystar = std::move(ystar);
    return core;
}

}  // namespace

AupecCurve estimate_aupec(const ExperimentData& data, const Rule& rule,
                          const EstimationOptions& options) {
    AupecCurve curve;
    curve.aupec = aupec_core(data, rule, options).est;
    curve.p_f_hat = curve.aupec.proportion_treated;

    const std::size_t n = data.n();
    const double nn = static_cast<double>(n);
    const double n1 = static_cast<double>(data.n1()), n0 = static_cast<double>(data.n0());
    const auto order = rank_order(rule.as_scoring().scores);
    const auto kp = kappa_profile(data, rule.as_scoring().scores);

    // Prefix sums of y and y^2 per arm along the ranking.
    double a1 = 0, b1 = 0, a0 = 0, b0 = 0, tot1 = 0, tot0 = 0, sq1 = 0, sq0 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double y = data.y()[i];
        if (data.t()[i]) {
            tot1 += y;
            sq1 += y * y;
        } else {
            tot0 += y;
            sq0 += y * y;
        }
    }
    const double m1 = tot1 / n1, m0 = tot0 / n0;
    auto arm_var = [](double sum, double sumsq, double cnt) {
        if (cnt < 2) return 0.0;
        return std::max(0.0, (sumsq - sum * sum / cnt) / (cnt - 1.0));
    };
    curve.points.reserve(n);
    for (std::size_t k = 1; k <= n; ++k) {
        const std::size_t i = order[k - 1];
        const double y = data.y()[i];
        if (data.t()[i]) {
            a1 += y;
            b1 += y * y;
        } else {
            a0 += y;
            b0 += y * y;
        }
        const double p = static_cast<double>(k) / nn;
        CurvePoint pt;
        pt.p = p;
        pt.value = a1 / n1 + (tot0 - a0) / n0;
        pt.pape = pt.value - p * m1 - (1.0 - p) * m0;
        // (f - p) y within each arm: (1-p) y on the top-k set, -p y elsewhere.
        const double s1 = (1.0 - p) * a1 - p * (tot1 - a1);
        const double q1 = (1.0 - p) * (1.0 - p) * b1 + p * p * (sq1 - b1);
        const double s0 = (1.0 - p) * a0 - p * (tot0 - a0);
        const double q0 = (1.0 - p) * (1.0 - p) * b0 + p * p * (sq0 - b0);
        const double v = arm_var(s1, q1, n1) / n1 + arm_var(s0, q0, n0) / n0 +
                         budget_kappa_term(n, k, p, kp.kappa1[k], kp.kappa0[k]);
        pt.std_error = std::sqrt(std::max(0.0, v));
        curve.points.push_back(pt);
    }
    return curve;
}

MetricEstimate estimate_aupec_normalized(const ExperimentData& data, const Rule& rule,
                                         const EstimationOptions& options) {
    auto core = aupec_core(data, rule, options);
    const std::size_t n = data.n();
    const double m1 = arm_mean(data, data.y(), 1), m0 = arm_mean(data, data.y(), 0);
    const double tau = m1 - m0;
    double scale = 0.0;
    for (double y : data.y()) scale = std::max(scale, std::fabs(y));
    if (std::fabs(tau) <= 1e-10 * scale || tau == 0.0)
        throw DegenerateDataError("normalized AUPEC undefined: estimated ATE is zero");

    const auto& sc = rule.as_scoring();
    std::size_t n_f = 0;
    for (double s : sc.scores) n_f += s > sc.floor_threshold;
    const auto w = aupec_weights(sc.scores, n_f);
    std::vector<double> yw(n);
    for (std::size_t i = 0; i < n; ++i) yw[i] = w[i] * data.y()[i];
    const double numer = arm_mean(data, yw, 1) - arm_mean(data, yw, 0);

    MetricEstimate est;
    est.metric = Metric::AUPEC_NORM;
    est.n_used = n;
    est.proportion_treated = core.est.proportion_treated;
    est.diagnostics = core.est.diagnostics;
    est.diagnostics.erase(diag::kVarianceClamped);
    est.diagnostics["aupec"] = core.est.point;
    est.point = numer / tau - 0.5;

    if (core.est.std_error) {
        const double g = core.est.point / tau;
        const double var_gamma = (*core.est.std_error) * (*core.est.std_error);
        auto cov_arm = [&](int arm) {
            const double ma = arm_mean(data, core.ystar, arm), mb = arm_mean(data, data.y(), arm);
            double s = 0.0;
            std::size_t c = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (data.t()[i] != arm) continue;
                s += (core.ystar[i] - ma) * (data.y()[i] - mb);
                ++c;
            }
            return s / static_cast<double>(c - 1) / static_cast<double>(c);
        };
        const double var_tau = *arm_variance(data, data.y(), 1) / static_cast<double>(data.n1()) +
                               *arm_variance(data, data.y(), 0) / static_cast<double>(data.n0());
        const double cov = cov_arm(1) + cov_arm(0);
        set_variance(est, (var_gamma - 2.0 * g * cov + g * g * var_tau) / (tau * tau));
    }
    return est;
}

}  // namespace itreval
