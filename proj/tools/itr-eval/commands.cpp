#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "itreval/cv.hpp"
#include "itreval/data.hpp"
#include "itreval/errors.hpp"
#include "itreval/learners.hpp"
#include "itreval/metrics.hpp"
#include "itreval/oracle.hpp"
#include "itreval/sim.hpp"
#include "itreval/special.hpp"
#include "itreval/variance_kit.hpp"

namespace itreval::cli {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

double parse_number(const std::string& s, const std::string& what) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0') throw InputError("invalid number for " + what + ": " + s);
    return v;
}

void check_common(const Common& c) {
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw InputError("--alpha must lie in (0, 1)");
    if (c.threads == 0) throw InputError("--threads must be positive");
    if (c.z_mode != "mc" && c.z_mode != "exact") throw InputError("--z-mode must be mc or exact");
    if (c.z_draws == 0) throw InputError("--z-draws must be positive");
}

void check_budget(std::optional<double> p) {
    if (p && !(*p >= 0.0 && *p <= 1.0)) throw InputError("--budget must lie in [0, 1]");
}

EstimationOptions estimation_options(const Common& c) {
    EstimationOptions o;
    o.z.mode = c.z_mode == "exact" ? ZMode::ExactPolynomial : ZMode::MonteCarlo;
    o.z.draws = c.z_draws;
    o.z.seed = c.resolved_seed();
    return o;
}

struct Loaded {
    ExperimentTable table;
    ExperimentData data;  // centered unless --no-center
    double delta = 0.0;
};

Loaded load(const Common& c, std::vector<std::string> extra, std::vector<std::string> covariates = {},
            bool center = true) {
    if (c.input.empty()) throw InputError("--input is required");
    ColumnSpec spec;
    spec.outcome = c.outcome_col;
    spec.treatment = c.treatment_col;
    extra.erase(std::remove(extra.begin(), extra.end(), std::string()), extra.end());
    spec.extra = std::move(extra);
    spec.covariates = std::move(covariates);
    Loaded l{load_experiment_file(c.input, spec), {}, 0.0};
    l.data = l.table.data;
    if (center && !c.no_center) {
        auto cd = center_outcomes(l.data);
        l.data = std::move(cd.data);
        l.delta = cd.delta;
    }
    return l;
}

Rule make_rule(const Loaded& l, const RuleFlags& f, const std::string& col, double default_threshold) {
    const auto& v = l.table.columns.at(col);
    if (f.fixed) {
        Assignment a(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i] != 0.0 && v[i] != 1.0)
                throw InputError("--fixed rule column " + col + " must hold 0/1 values");
            a[i] = static_cast<std::uint8_t>(v[i]);
        }
        return Rule::fixed(std::move(a));
    }
    return Rule::scoring(v, f.threshold.value_or(default_threshold));
}

void add_context(Record& r, const Common& c, const Loaded& l, bool centered) {
    r["n1"] = l.data.n1();
    r["n0"] = l.data.n0();
    r["seed"] = c.resolved_seed();
    r["centered"] = centered && !c.no_center;
    r["center_delta"] = l.delta;
}

// Bias bound at epsilon; the cap is user supplied or the plug-in kappa value.
void add_bias_bound(Record& r, double epsilon, std::optional<double> user_cap, double plugin_cap,
                    const std::function<BiasBound(double)>& bound) {
    r["bias_epsilon"] = epsilon;
    const double cap = user_cap ? *user_cap : plugin_cap;
    r["cate_cap"] = cap;
    r["cate_cap_source"] = user_cap ? "user" : "plug-in";
    if (cap > 0.0) r["bias_bound"] = bound(cap).probability_bound;
    else r["bias_bound"] = nullptr;
}

void check_epsilon(const EvaluateArgs& a) {
    if (!(a.epsilon > 0.0)) throw InputError("--epsilon must be positive");
    if (a.cate_cap && !(*a.cate_cap > 0.0)) throw InputError("--cate-cap must be positive");
}

LearnerSpec learner_spec(const std::string& name, const CrossvalArgs& a,
                         const std::vector<std::string>& covariates, std::uint64_t seed) {
    LearnerSpec spec{LinearTLearner{a.ridge}, seed};
    if (name == "linear-t") return spec;
    if (name == "diff-means-bin") {
        std::size_t idx = 0;
        if (!a.bin_covariate.empty()) {
            auto it = std::find(covariates.begin(), covariates.end(), a.bin_covariate);
            if (it == covariates.end())
                throw InputError("--bin-covariate " + a.bin_covariate + " is not among --covariates");
            idx = static_cast<std::size_t>(it - covariates.begin());
        }
        spec.kind = DiffMeansByBin{idx, a.bins};
        return spec;
    }
    throw InputError("unknown learner: " + name + " (expected linear-t or diff-means-bin)");
}

}  // namespace

std::uint64_t Common::resolved_seed() const {
    if (seed) return *seed;
    if (const char* env = std::getenv("ITR_EVAL_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (*env == '\0' || *end != '\0') throw InputError("ITR_EVAL_SEED must be a non-negative integer");
        return v;
    }
    return 0;
}

Record run_evaluate(const EvaluateArgs& a) {
    check_common(a.common);
    check_budget(a.rule.budget);
    check_epsilon(a);
    const std::string& m = a.metric;
    if (m != "pav" && m != "pape" && m != "aupec" && m != "aupec-norm")
        throw InputError("unknown metric: " + m + " (expected pav, pape, aupec or aupec-norm)");
    if (a.rule.budget && (m == "aupec" || m == "aupec-norm"))
        throw InputError("--budget does not apply to " + m);
    if (a.rule.fixed && (a.rule.budget || m == "aupec" || m == "aupec-norm"))
        throw InputError("a --fixed rule has no scores to rank");

    // PAV is reported on the original outcome scale.
    const bool center = m != "pav";
    const Loaded l = load(a.common, {a.rule.rule_col}, {}, center);
    const double default_c = (m == "aupec" || m == "aupec-norm") ? kNegInf : 0.0;
    Rule rule = make_rule(l, a.rule, a.rule.rule_col, default_c);
    const auto opts = estimation_options(a.common);
    const std::size_t n = l.data.n();

    MetricEstimate est;
    Record extra;
    if (m == "pav") {
        if (a.rule.budget) rule = Rule::fixed(assignments(rule, *a.rule.budget));
        est = estimate_pav(l.data, rule);
    } else if (m == "pape" && a.rule.budget) {
        const double p = *a.rule.budget;
        est = estimate_pape_budget(l.data, rule, p);
        const double cap = std::max(std::fabs(est.diagnostics[diag::kKappa1]), std::fabs(est.diagnostics[diag::kKappa0]));
        add_bias_bound(extra, a.epsilon, a.cate_cap, cap,
                       [&](double c) { return bias_bound_pape_budget(n, p, a.epsilon, c); });
    } else if (m == "pape") {
        est = estimate_pape(l.data, rule);
    } else {
        const auto curve = estimate_aupec(l.data, rule, opts);
        const auto fa = assignments(rule);
        const auto n_f = static_cast<std::size_t>(std::count(fa.begin(), fa.end(), 1));
        const auto kp = kappa_profile(l.data, rule.as_scoring().scores);
        const double cap = n_f > 0 ? std::max(std::fabs(kp.kappa1[n_f]), std::fabs(kp.kappa0[n_f])) : 0.0;
        est = m == "aupec" ? curve.aupec : estimate_aupec_normalized(l.data, rule, opts);
        add_bias_bound(extra, a.epsilon, a.cate_cap, cap,
                       [&](double c) { return bias_bound_aupec(n, curve.p_f_hat, a.epsilon, c); });
    }
    Record r = estimate_record(est, a.common.alpha);
    r["budget"] = a.rule.budget ? Record(*a.rule.budget) : Record(nullptr);
    add_context(r, a.common, l, center);
    for (auto& [k, v] : extra.items()) r[k] = v;
    return r;
}

Record run_compare(const EvaluateArgs& a) {
    check_common(a.common);
    check_budget(a.rule.budget);
    check_epsilon(a);
    if (a.rule.rule_col_g.empty()) throw InputError("--rule-col-g is required");
    if (a.metric != "papd" && a.metric != "value-diff")
        throw InputError("unknown metric: " + a.metric + " (expected papd or value-diff)");
    const bool papd = a.metric == "papd";
    if (papd && !a.rule.budget) throw InputError("papd needs --budget");
    if (papd && a.rule.fixed) throw InputError("a --fixed rule has no scores to rank");
    if (!papd && a.rule.budget) throw InputError("--budget applies to papd only");

    const Loaded l = load(a.common, {a.rule.rule_col, a.rule.rule_col_g});
    const Rule f = make_rule(l, a.rule, a.rule.rule_col, 0.0);
    const Rule g = make_rule(l, a.rule, a.rule.rule_col_g, 0.0);
    MetricEstimate est;
    Record extra;
    if (papd) {
        const double p = *a.rule.budget;
        est = estimate_papd_budget(l.data, f, g, p);
        const double cap = std::max(std::fabs(est.diagnostics[diag::kKappa1]), std::fabs(est.diagnostics[diag::kKappaG1]));
        const std::size_t n = l.data.n();
        add_bias_bound(extra, a.epsilon, a.cate_cap, cap,
                       [&](double c) { return bias_bound_papd(n, p, a.epsilon, c); });
    } else {
        est = value_difference(l.data, f, g);
    }
    Record r = estimate_record(est, a.common.alpha);
    r["budget"] = a.rule.budget ? Record(*a.rule.budget) : Record(nullptr);
    add_context(r, a.common, l, true);
    for (auto& [k, v] : extra.items()) r[k] = v;
    return r;
}

Record run_crossval(const CrossvalArgs& a) {
    check_common(a.common);
    check_budget(a.budget);
    const auto covariates = split(a.covariates, ',');
    if (covariates.empty()) throw InputError("--covariates is required (comma-separated column names)");
    const Loaded l = load(a.common, {}, covariates);
    const std::uint64_t seed = a.common.resolved_seed();
    const LearnerSpec lf = learner_spec(a.learner, a, covariates, seed);
    CvOptions co;
    co.estimation = estimation_options(a.common);
    co.threads = a.common.threads;

    const std::string& m = a.metric;
    CvResult res;
    if (m == "pav" || m == "pape") {
        if (a.budget) {
            if (m == "pav") throw InputError("--budget is not available for cross-validated pav");
            res = crossval(l.data, lf, CvMetricSpec::pape_budget(*a.budget), a.folds, seed, co);
        } else {
            res = crossval(l.data, lf, m == "pav" ? CvMetricSpec::pav(a.threshold) : CvMetricSpec::pape(a.threshold),
                           a.folds, seed, co);
        }
    } else if (m == "papd") {
        if (!a.budget) throw InputError("papd needs --budget");
        res = cv_papd_budget(l.data, lf, learner_spec(a.learner_g, a, covariates, seed), *a.budget, a.folds, seed, co);
    } else if (m == "aupec") {
        if (a.budget) throw InputError("--budget does not apply to aupec");
        res = cv_aupec(l.data, lf, a.threshold, a.folds, seed, co);
    } else {
        throw InputError("unknown metric: " + m + " (expected pav, pape, papd or aupec)");
    }
    Record r = estimate_record(res.pooled, a.common.alpha);
    r["budget"] = a.budget ? Record(*a.budget) : Record(nullptr);
    add_context(r, a.common, l, true);
    r["folds"] = a.folds;
    r["learner"] = lf.name();
    r["unequal_folds"] = res.plan.unequal;
    r["between_fold_s2"] = res.s2_f;
    return r;
}

Record run_curve(const EvaluateArgs& a) {
    check_common(a.common);
    if (a.rule.fixed) throw InputError("a --fixed rule has no scores to rank");
    const Loaded l = load(a.common, {a.rule.rule_col});
    const Rule rule = make_rule(l, a.rule, a.rule.rule_col, kNegInf);
    const auto curve = estimate_aupec(l.data, rule, estimation_options(a.common));
    Record rows = Record::array();
    for (const auto& pt : curve.points) {
        Record row;
        row["p"] = pt.p;
        row["value"] = pt.value;
        row["pape"] = pt.pape;
        row["se"] = pt.std_error;
        rows.push_back(std::move(row));
    }
    return rows;
}

void run_simulate(const SimulateArgs& a, std::ostream& out) {
    check_common(a.common);
    std::vector<double> xis;
    if (a.scenario == "low" || a.scenario == "both") xis.push_back(1.0 / 3.0);
    if (a.scenario == "high" || a.scenario == "both") xis.push_back(2.0);
    if (xis.empty()) throw InputError("--scenario must be low, high or both");

    std::vector<SimMetric> metrics;
    for (const auto& item : split(a.metrics, ',')) {
        const auto colon = item.find(':');
        const std::string name = item.substr(0, colon);
        const double p = colon == std::string::npos ? 0.0 : parse_number(item.substr(colon + 1), item);
        if (name == "pav") metrics.push_back({Metric::PAV, 0.0});
        else if (name == "pape") metrics.push_back({Metric::PAPE, 0.0});
        else if (name == "pape-budget") metrics.push_back({Metric::PAPE_BUDGET, p});
        else if (name == "papd") metrics.push_back({Metric::PAPD_BUDGET, p});
        else if (name == "aupec") metrics.push_back({Metric::AUPEC, 0.0});
        else if (name == "aupec-norm") metrics.push_back({Metric::AUPEC_NORM, 0.0});
        else if (name == "value-diff") metrics.push_back({Metric::VALUE_DIFF, 0.0});
        else throw InputError("unknown simulation metric: " + name);
        check_budget(metrics.back().p);
    }
    if (metrics.empty()) throw InputError("--metrics is empty");

    StudyMode mode;
    if (a.mode == "fixed") {
        mode = FixedRuleMode{};
    } else if (a.mode == "crossval") {
        CrossvalMode cm;
        cm.K = a.folds;
        cm.aux_trials = a.aux_trials;
        mode = cm;
    } else {
        throw InputError("--mode must be fixed or crossval");
    }
    StudyOptions so;
    so.estimation.z.mode = a.common.z_mode == "exact" ? ZMode::ExactPolynomial : ZMode::MonteCarlo;
    so.estimation.z.draws = a.common.z_draws;
    so.threads = a.common.threads;
    so.z = normal_quantile(1.0 - a.common.alpha / 2.0);

    std::vector<CoverageReport> reports;
    for (double xi : xis) {
        DgpConfig c;
        c.n = a.n;
        c.xi = xi;
        c.trials = a.trials;
        c.seed = a.common.resolved_seed();
        if (!a.covariate_csv.empty()) {
            c.covariate_source = CovariateSource::UserCsv;
            c.csv_path = a.covariate_csv;
        }
        reports.push_back(coverage_study(c, metrics, mode, so));
    }
    if (a.table) {
        write_report_table(out, reports);
    } else if (a.common.json) {
        Record rows = Record::array();
        for (const auto& rep : reports)
            for (const auto& m : rep.metrics)
                rows.push_back({{"scenario", rep.scenario}, {"mode", rep.mode}, {"n", rep.config.n},
                                {"metric", m.label}, {"truth", m.truth}, {"mean_estimate", m.mean_estimate},
                                {"bias", m.bias}, {"sd", m.sd}, {"mean_se", m.mean_se},
                                {"coverage", m.coverage}, {"trials", m.trials}, {"redraws", m.redraws},
                                {"seed", rep.config.seed}});
        write_records(out, rows, true);
    } else {
        write_report_csv(out, reports);
    }
}

Record run_oracle_check(const OracleArgs& a) {
    check_common(a.common);
    check_budget(a.rule.budget);
    if (a.common.input.empty()) throw InputError("--input is required");
    std::ifstream in(a.common.input);
    if (!in) throw InputError("cannot open " + a.common.input);
    const auto cols = load_covariates(in, {a.y0_col, a.y1_col, a.rule.rule_col});
    PotentialPopulation pop;
    for (std::size_t i = 0; i < cols.rows; ++i) {
        pop.y0.push_back(cols.at(i, 0));
        pop.y1.push_back(cols.at(i, 1));
        pop.scores.push_back(cols.at(i, 2));
    }
    pop.validate();
    const std::size_t n = pop.n();
    const std::size_t n1 = a.n1.value_or(n / 2);
    if (n1 < 2 || n1 + 2 > n) throw InputError("--n1 must leave at least two units in each arm");

    const std::string& m = a.metric;
    const auto opts = estimation_options(a.common);
    auto make = [&]() {
        if (!a.rule.fixed) return Rule::scoring(pop.scores, a.rule.threshold.value_or(0.0));
        Assignment f(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (pop.scores[i] != 0.0 && pop.scores[i] != 1.0)
                throw InputError("--fixed rule column must hold 0/1 values");
            f[i] = static_cast<std::uint8_t>(pop.scores[i]);
        }
        return Rule::fixed(std::move(f));
    };
    Rule rule = make();
    OracleSpec spec;
    Estimator est;
    const double nn = static_cast<double>(n);
    if (m == "pav") {
        spec.metric = Metric::PAV;
        est = [&](const ExperimentData& d) { return estimate_pav(d, rule).point; };
    } else if (m == "pape" && a.rule.budget) {
        spec = {Metric::PAPE_BUDGET, *a.rule.budget, std::nullopt};
        rule = Rule::scoring(pop.scores);
        est = [&](const ExperimentData& d) { return estimate_pape_budget(d, rule, *a.rule.budget).point; };
    } else if (m == "pape") {
        // The (n-1)/n rescaling gives the unbiased estimator of the SAPE.
        spec.metric = Metric::PAPE;
        est = [&](const ExperimentData& d) { return (nn - 1.0) / nn * estimate_pape(d, rule).point; };
    } else if (m == "aupec") {
        spec.metric = Metric::AUPEC;
        rule = Rule::scoring(pop.scores, a.rule.threshold.value_or(kNegInf));
        est = [&](const ExperimentData& d) { return estimate_aupec(d, rule, opts).aupec.point; };
    } else {
        throw InputError("unknown metric: " + m + " (expected pav, pape or aupec)");
    }
    if (a.rule.fixed && (spec.metric != Metric::PAV && spec.metric != Metric::PAPE))
        throw InputError("a --fixed rule has no scores to rank");

    const double truth = true_metric(pop, rule, spec);
    const auto dist = enumerate_randomizations(pop, n1, est, a.common.threads);
    Record r;
    r["metric"] = std::string(metric_name(spec.metric));
    r["truth"] = truth;
    r["enumerated_mean"] = dist.mean;
    r["bias"] = dist.mean - truth;
    r["enumerated_variance"] = dist.variance;
    r["assignments"] = dist.count;
    r["n"] = n;
    r["n1"] = n1;
    r["budget"] = a.rule.budget ? Record(*a.rule.budget) : Record(nullptr);
    if (spec.metric == Metric::PAPE) r["closed_form_variance"] = sape_exact_variance(pop, assignments(rule), n1);
    r["seed"] = a.common.resolved_seed();
    return r;
}

}  // namespace itreval::cli
