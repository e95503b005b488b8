#include "itreval/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>

#include "itreval/cv.hpp"
#include "itreval/errors.hpp"
#include "itreval/parallel.hpp"
#include "itreval/rng.hpp"
#include "itreval/special.hpp"

namespace itreval {

namespace {

// Stream tags for the counter-based seeds used below.
constexpr std::uint64_t kPopulationStream = 0x55;
constexpr std::uint64_t kDrawStream = 0x61;
constexpr std::uint64_t kTrainStream = 0x71;
constexpr std::uint64_t kTrialStream = 0x72;
constexpr std::uint64_t kAttemptStream = 0x73;
constexpr std::uint64_t kZStream = 0x74;
constexpr std::uint64_t kFoldStream = 0x75;
constexpr std::uint64_t kAuxStream = 0x76;

}  // namespace

void DgpConfig::validate() const {
    if (n < 20) throw InputError("simulation sample size must be at least 20");
    if (trials < 1) throw InputError("need at least one trial");
    if (!(xi > 0.0) || !std::isfinite(xi)) throw InputError("xi must be positive");
    if (covariate_source == CovariateSource::Synthetic && population_size < 2)
        throw InputError("synthetic population needs at least 2 rows");
    if (covariate_source == CovariateSource::UserCsv && csv_path.empty())
        throw InputError("covariate CSV path is empty");
}

Covariates synthetic_covariates(std::size_t rows, std::uint64_t seed) {
    Covariates x;
    x.rows = rows;
    x.names = {kDgpColumns.begin(), kDgpColumns.end()};
    x.names.push_back("x_aux");
    x.cols = x.names.size();
    x.values.resize(rows * x.cols);
    auto eng = make_engine(seed, kPopulationStream);
    std::normal_distribution<double> norm(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    for (std::size_t i = 0; i < rows; ++i) {
        double* r = x.values.data() + i * x.cols;
        r[0] = norm(eng);
        r[1] = norm(eng);
        r[2] = norm(eng);
        for (int j = 3; j < 7; ++j) r[j] = coin(eng) ? 1.0 : 0.0;
        r[7] = norm(eng);
    }
    return x;
}

double dgp_pi(const DgpRow& r) {
    return 1.0 / (1.0 + std::exp(3.0 * (r.x1 + r.x43 + 0.3 * (r.x10 - 1.0)) - 1.0));
}

double dgp_mu(const DgpRow& r) { return -std::sin(normal_cdf(dgp_pi(r))) + r.x43; }

double dgp_tau(const DgpRow& r, double xi) {
    return xi * (r.x3 * r.x24 + (r.x14 - 1.0) - (r.x15 - 1.0));
}

Dgp::Dgp(DgpConfig config) : config_(std::move(config)) {
    config_.validate();
    const std::vector<std::string> cols(kDgpColumns.begin(), kDgpColumns.end());
    if (config_.covariate_source == CovariateSource::Synthetic) {
        population_ = synthetic_covariates(config_.population_size, config_.population_seed);
    } else {
        std::ifstream in(config_.csv_path);
        if (!in) throw InputError("cannot open '" + config_.csv_path + "'");
        population_ = load_covariates(in, cols);
    }
    for (std::size_t k = 0; k < cols.size(); ++k) {
        auto it = std::find(population_.names.begin(), population_.names.end(), cols[k]);
        col_[k] = static_cast<std::size_t>(it - population_.names.begin());
    }
}

DgpRow Dgp::row(std::size_t i) const {
    const auto r = population_.row(i);
    return {r[col_[0]], r[col_[1]], r[col_[2]], r[col_[3]], r[col_[4]], r[col_[5]], r[col_[6]]};
}

DgpSample Dgp::draw(std::uint64_t key, std::size_t size) const {
    const std::size_t n = size ? size : config_.n;
    if (n < 4) throw InputError("sample size must be at least 4");
    auto eng = make_engine(key, kDrawStream);
    std::uniform_int_distribution<std::size_t> pick(0, population_.rows - 1);
    std::normal_distribution<double> norm(0.0, 1.0);

    DgpSample s;
    s.rows.resize(n);
    for (auto& r : s.rows) r = pick(eng);

    std::vector<double> mu(n), tau(n), signal(n);
    for (std::size_t i = 0; i < n; ++i) {
        const DgpRow r = row(s.rows[i]);
        mu[i] = dgp_mu(r);
        tau[i] = dgp_tau(r, config_.xi);
        signal[i] = mu[i] + dgp_pi(r) * tau[i];
    }
    double m = 0.0;
    for (double v : signal) m += v;
    m /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : signal) ss += (v - m) * (v - m);
    s.sigma = 0.25 * std::sqrt(ss / static_cast<double>(n - 1));

    s.potential.y0.resize(n);
    s.potential.y1.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double e = s.sigma * norm(eng);
        s.potential.y0[i] = mu[i] + e;
        s.potential.y1[i] = mu[i] + tau[i] + e;
    }
    s.potential.x = population_.subset(s.rows);

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), eng);
    std::vector<std::uint8_t> t(n, 0);
    for (std::size_t j = 0; j < n / 2; ++j) t[perm[j]] = 1;
    s.data = s.potential.observe(t);
    return s;
}

PotentialPopulation Dgp::truth_population() const {
    PotentialPopulation pop;
    const std::size_t n = population_.rows;
    pop.y0.resize(n);
    pop.y1.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const DgpRow r = row(i);
        pop.y0[i] = dgp_mu(r);
        pop.y1[i] = pop.y0[i] + dgp_tau(r, config_.xi);
    }
    pop.x = population_;
    return pop;
}

DgpSample dgp_sample(const DgpConfig& config) {
    return Dgp(config).draw(stream_key(config.seed, kTrialStream, 0));
}

std::string SimMetric::label() const {
    std::ostringstream os;
    os << metric_name(metric);
    if (metric == Metric::PAPE_BUDGET || metric == Metric::PAPD_BUDGET) os << "(" << p << ")";
    return os.str();
}

namespace {

struct Draw {
    double point = 0.0;
    double se = 0.0;
};

std::string scenario_name(double xi) {
    if (xi == 2.0) return "high";
    if (std::abs(xi - 1.0 / 3.0) < 1e-12) return "low";
    std::ostringstream os;
    os << "xi=" << xi;
    return os.str();
}

Draw checked(const MetricEstimate& e) {
    if (!e.std_error) throw DegenerateDataError("no standard error for " + std::string(metric_name(e.metric)));
    return {e.point, *e.std_error};
}

// Population-level data with the population covariates, for scoring.
ExperimentData scoring_frame(const PotentialPopulation& pop) {
    std::vector<std::uint8_t> t(pop.n());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<std::uint8_t>(i % 2);
    return pop.observe(t);
}

Draw fixed_estimate(const SimMetric& m, const ExperimentData& data, const Rule& f, const Rule& g,
                    const EstimationOptions& opts) {
    switch (m.metric) {
        case Metric::PAV: return checked(estimate_pav(data, f));
        case Metric::PAPE: return checked(estimate_pape(data, f));
        case Metric::PAPE_BUDGET: return checked(estimate_pape_budget(data, f, m.p));
        case Metric::PAPD_BUDGET: return checked(estimate_papd_budget(data, f, g, m.p));
        case Metric::VALUE_DIFF: return checked(value_difference(data, f, g));
        case Metric::AUPEC: return checked(estimate_aupec(data, f, opts).aupec);
        case Metric::AUPEC_NORM: return checked(estimate_aupec_normalized(data, f, opts));
    }
    throw InputError("unknown metric");
}

Draw cv_estimate(const SimMetric& m, const ExperimentData& data, const CrossvalMode& mode,
                 std::uint64_t fold_seed, const CvOptions& opts) {
    switch (m.metric) {
        case Metric::PAV:
            return checked(crossval(data, mode.f, CvMetricSpec::pav(mode.c_star), mode.K, fold_seed, opts).pooled);
        case Metric::PAPE:
            return checked(crossval(data, mode.f, CvMetricSpec::pape(mode.c_star), mode.K, fold_seed, opts).pooled);
        case Metric::PAPE_BUDGET:
            return checked(crossval(data, mode.f, CvMetricSpec::pape_budget(m.p), mode.K, fold_seed, opts).pooled);
        case Metric::PAPD_BUDGET:
            return checked(cv_papd_budget(data, mode.f, mode.g, m.p, mode.K, fold_seed, opts).pooled);
        case Metric::AUPEC:
            return checked(cv_aupec(data, mode.f, mode.c_star, mode.K, fold_seed, opts).pooled);
        default:
            throw InputError(std::string(metric_name(m.metric)) + " is not available in cross-validation studies");
    }
}

// Runs `trials` independent replications; evaluate(key, attempt) returns one
// Draw per metric or throws a degeneracy error to request a redraw.
template <class Eval>
std::vector<std::vector<Draw>> replicate(std::size_t trials, std::uint64_t base, std::uint64_t stream,
                                         const StudyOptions& opts, std::vector<std::size_t>& redraws,
                                         Eval&& evaluate) {
    std::vector<std::vector<Draw>> out(trials);
    redraws.assign(trials, 0);
    parallel_for(trials, opts.threads, [&](std::size_t trial) {
        const std::uint64_t key = stream_key(base, stream, trial);
        for (std::size_t attempt = 0;; ++attempt) {
            if (attempt > opts.max_redraws)
                throw DegenerateDataError("trial " + std::to_string(trial) +
                                          " stayed degenerate after redraws");
            try {
                out[trial] = evaluate(stream_key(key, kAttemptStream, attempt));
                redraws[trial] = attempt;
                return;
            } catch (const DegenerateDataError&) {
            } catch (const FitError&) {
            }
        }
    });
    return out;
}

}  // namespace

CoverageReport coverage_study(const DgpConfig& config, const std::vector<SimMetric>& metrics,
                              const StudyMode& mode, const StudyOptions& options) {
    if (metrics.empty()) throw InputError("no metrics requested");
    const Dgp dgp(config);
    CoverageReport report;
    report.scenario = scenario_name(config.xi);
    report.config = config;

    std::vector<double> truth(metrics.size(), 0.0);
    std::vector<std::vector<Draw>> draws;
    std::vector<std::size_t> redraws;

    if (const auto* fm = std::get_if<FixedRuleMode>(&mode)) {
        report.mode = "fixed";
        const DgpSample train = dgp.draw(stream_key(config.seed, kTrainStream), fm->train_n);
        const FittedScorer sf = fit(fm->f, train.data);
        const FittedScorer sg = fit(fm->g, train.data);

        const PotentialPopulation pop = dgp.truth_population();
        const ExperimentData frame = scoring_frame(pop);
        const Rule pf = sf.rule(frame, fm->c_star);
        const Rule pg = sg.rule(frame, fm->c_star);
        for (std::size_t j = 0; j < metrics.size(); ++j)
            truth[j] = true_metric(pop, pf, {metrics[j].metric, metrics[j].p, pg});

        draws = replicate(config.trials, config.seed, kTrialStream, options, redraws,
                          [&](std::uint64_t key) {
                              const DgpSample s = dgp.draw(key);
                              const Rule f = sf.rule(s.data, fm->c_star);
                              const Rule g = sg.rule(s.data, fm->c_star);
                              EstimationOptions eo = options.estimation;
                              eo.z.seed = stream_key(key, kZStream);
                              std::vector<Draw> row;
                              for (const auto& m : metrics)
                                  row.push_back(fixed_estimate(m, s.data, f, g, eo));
                              return row;
                          });
    } else {
        const auto& cm = std::get<CrossvalMode>(mode);
        report.mode = "crossval";
        auto evaluate = [&](std::uint64_t key) {
            const DgpSample s = dgp.draw(key);
            CvOptions co;
            co.estimation = options.estimation;
            co.estimation.z.seed = stream_key(key, kZStream);
            const std::uint64_t fold_seed = stream_key(key, kFoldStream);
            std::vector<Draw> row;
            for (const auto& m : metrics) row.push_back(cv_estimate(m, s.data, cm, fold_seed, co));
            return row;
        };
        // Truth: mean of the cv estimates over independent auxiliary replications.
        const std::size_t aux = cm.aux_trials ? cm.aux_trials : config.trials;
        std::vector<std::size_t> aux_redraws;
        const auto aux_draws =
            replicate(aux, config.seed, kAuxStream, options, aux_redraws, evaluate);
        for (std::size_t j = 0; j < metrics.size(); ++j) {
            double s = 0.0;
            for (const auto& row : aux_draws) s += row[j].point;
            truth[j] = s / static_cast<double>(aux);
        }
        draws = replicate(config.trials, config.seed, kTrialStream, options, redraws, evaluate);
    }

    std::size_t total_redraws = 0;
    for (auto r : redraws) total_redraws += r;
    const double T = static_cast<double>(config.trials);
    for (std::size_t j = 0; j < metrics.size(); ++j) {
        MetricReport r;
        r.label = metrics[j].label();
        r.truth = truth[j];
        r.trials = config.trials;
        r.redraws = total_redraws;
        double sum = 0.0, se_sum = 0.0, hits = 0.0;
        for (const auto& row : draws) {
            sum += row[j].point;
            se_sum += row[j].se;
            if (std::abs(row[j].point - truth[j]) <= options.z * row[j].se) hits += 1.0;
        }
        r.mean_estimate = sum / T;
        r.bias = r.mean_estimate - r.truth;
        double ss = 0.0;
        for (const auto& row : draws) ss += (row[j].point - r.mean_estimate) * (row[j].point - r.mean_estimate);
        r.sd = config.trials > 1 ? std::sqrt(ss / (T - 1.0)) : 0.0;
        r.mean_se = se_sum / T;
        r.coverage = hits / T;
        report.metrics.push_back(r);
    }
    return report;
}

void write_report_csv(std::ostream& out, const std::vector<CoverageReport>& reports) {
    out << "scenario,mode,n,metric,truth,mean_estimate,bias,sd,mean_se,coverage,trials,redraws\n";
    std::ostringstream os;
    os << std::setprecision(8);
    for (const auto& rep : reports)
        for (const auto& m : rep.metrics)
            os << rep.scenario << ',' << rep.mode << ',' << rep.config.n << ',' << m.label << ','
               << m.truth << ',' << m.mean_estimate << ',' << m.bias << ',' << m.sd << ','
               << m.mean_se << ',' << m.coverage << ',' << m.trials << ',' << m.redraws << '\n';
    out << os.str();
}

void write_report_table(std::ostream& out, const std::vector<CoverageReport>& reports) {
    std::ostringstream os;
    os << std::fixed;
    for (const auto& rep : reports) {
        os << rep.scenario << " effect, " << rep.mode << ", n = " << rep.config.n << ", "
           << rep.config.trials << " trials\n";
        os << std::left << std::setw(18) << "metric" << std::right << std::setw(10) << "truth"
           << std::setw(10) << "bias" << std::setw(10) << "sd" << std::setw(10) << "mean se"
           << std::setw(10) << "coverage" << '\n';
        for (const auto& m : rep.metrics) {
            os << std::left << std::setw(18) << m.label << std::right << std::setprecision(3)
               << std::setw(10) << m.truth << std::setw(10) << m.bias << std::setw(10) << m.sd
               << std::setw(10) << m.mean_se << std::setprecision(1) << std::setw(9)
               << 100.0 * m.coverage << "%\n";
        }
        if (!rep.metrics.empty() && rep.metrics.front().redraws)
            os << "redrawn trials: " << rep.metrics.front().redraws << '\n';
        os << '\n';
    }
    out << os.str();
}

}  // namespace itreval
