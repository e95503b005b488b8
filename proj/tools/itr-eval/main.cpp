// itr-eval: evaluate individualized treatment rules on experiment CSVs.

#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "itreval/errors.hpp"

using namespace itreval::cli;

namespace {

void add_common(CLI::App& cmd, Common& c, bool needs_input = true) {
    if (needs_input) {
        cmd.add_option("--input", c.input, "Experiment CSV")->required();
        cmd.add_option("--outcome-col", c.outcome_col, "Outcome column")->capture_default_str();
        cmd.add_option("--treatment-col", c.treatment_col, "Treatment column (0/1)")->capture_default_str();
    }
    cmd.add_option("--output", c.output, "Write the report here instead of stdout");
    cmd.add_flag("--json", c.json, "Emit JSON instead of CSV");
    cmd.add_option("--alpha", c.alpha, "Confidence intervals at level 1 - alpha")->capture_default_str();
    cmd.add_option("--seed", c.seed, "Seed; falls back to ITR_EVAL_SEED, then 0");
    cmd.add_option("--threads", c.threads, "Worker threads (results do not depend on it)")->capture_default_str();
    cmd.add_option("--z-draws", c.z_draws, "Monte Carlo draws for the binomial-Z terms")->capture_default_str();
    cmd.add_option("--z-mode", c.z_mode, "Binomial-Z terms: mc or exact")->capture_default_str();
    cmd.add_option("--config", "Flat key = value file; keys are flag names, flags win");
}

void add_rule(CLI::App& cmd, RuleFlags& r, bool budget = true) {
    cmd.add_option("--rule-col", r.rule_col, "Score column (or 0/1 column with --fixed)")->required();
    cmd.add_flag("--fixed", r.fixed, "Treat the rule column as a fixed 0/1 assignment");
    cmd.add_option("--threshold", r.threshold,
                   "Treat units with score > threshold (default 0; -inf for aupec and curve)");
    if (budget) cmd.add_option("--budget", r.budget, "Budget p: treat the top floor(n p) scores");
}

int emit(const Common& c, const std::function<void(std::ostream&)>& write) {
    if (c.output.empty()) {
        write(std::cout);
        return 0;
    }
    std::ofstream out(c.output);
    if (!out) throw itreval::InputError("cannot write " + c.output);
    write(out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app("Evaluate individualized treatment rules on randomized experiments.", "itr-eval");
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    EvaluateArgs ev, cmp, crv;
    cmp.metric = "papd";
    CrossvalArgs cv;
    SimulateArgs sim;
    OracleArgs orc;

    auto* evaluate = app.add_subcommand("evaluate", "Estimate a metric for one rule");
    add_common(*evaluate, ev.common);
    add_rule(*evaluate, ev.rule);
    evaluate->add_option("--metric", ev.metric, "pav, pape, aupec or aupec-norm")->capture_default_str();
    evaluate->add_flag("--no-center", ev.common.no_center, "Do not center outcomes");
    evaluate->add_option("--cate-cap", ev.cate_cap, "Upper bound on |CATE| for the bias bound");
    evaluate->add_option("--epsilon", ev.epsilon, "Bias level for the bias bound")->capture_default_str();

    auto* compare = app.add_subcommand("compare", "Compare two rules (PAPD or value difference)");
    add_common(*compare, cmp.common);
    add_rule(*compare, cmp.rule);
    compare->add_option("--rule-col-g", cmp.rule.rule_col_g, "Score column of the second rule")->required();
    compare->add_option("--metric", cmp.metric, "papd or value-diff")->capture_default_str();
    compare->add_flag("--no-center", cmp.common.no_center, "Do not center outcomes");
    compare->add_option("--cate-cap", cmp.cate_cap, "Upper bound on |CATE| for the bias bound");
    compare->add_option("--epsilon", cmp.epsilon, "Bias level for the bias bound")->capture_default_str();

    auto* crossval = app.add_subcommand("crossval", "Cross-validated evaluation of a learner");
    add_common(*crossval, cv.common);
    crossval->add_option("--covariates", cv.covariates, "Comma-separated covariate columns")->required();
    crossval->add_option("--metric", cv.metric, "pav, pape, papd or aupec")->capture_default_str();
    crossval->add_option("--budget", cv.budget, "Budget p (pape, papd)");
    crossval->add_option("--threshold", cv.threshold, "Threshold c* on fitted scores")->capture_default_str();
    crossval->add_option("--learner", cv.learner, "linear-t or diff-means-bin")->capture_default_str();
    crossval->add_option("--learner-g", cv.learner_g, "Second learner for papd")->capture_default_str();
    crossval->add_option("--ridge", cv.ridge, "Ridge penalty of linear-t")->capture_default_str();
    crossval->add_option("--bin-covariate", cv.bin_covariate, "Covariate binned by diff-means-bin");
    crossval->add_option("--bins", cv.bins, "Quantile bins of diff-means-bin")->capture_default_str();
    crossval->add_option("--folds", cv.folds, "Number of folds K")->capture_default_str();
    crossval->add_flag("--no-center", cv.common.no_center, "Do not center outcomes");

    auto* curve = app.add_subcommand("curve", "Prescriptive effect curve points for plotting");
    add_common(*curve, crv.common);
    add_rule(*curve, crv.rule, false);
    curve->add_flag("--no-center", crv.common.no_center, "Do not center outcomes");

    auto* simulate = app.add_subcommand("simulate", "Coverage study on the synthetic outcome model");
    add_common(*simulate, sim.common, false);
    simulate->add_option("--scenario", sim.scenario, "low, high or both")->capture_default_str();
    simulate->add_option("--n", sim.n, "Sample size per trial")->capture_default_str();
    simulate->add_option("--trials", sim.trials, "Trials per scenario")->capture_default_str();
    simulate->add_option("--mode", sim.mode, "fixed or crossval")->capture_default_str();
    simulate->add_option("--folds", sim.folds, "Folds in crossval mode")->capture_default_str();
    simulate->add_option("--aux-trials", sim.aux_trials, "Replications for the crossval truth (0: --trials)");
    simulate->add_option("--metrics", sim.metrics, "Comma list; budgets as name:p")->capture_default_str();
    simulate->add_option("--covariate-csv", sim.covariate_csv, "Use covariates from this CSV");
    simulate->add_flag("--table", sim.table, "Print a human-readable table");

    auto* oracle = app.add_subcommand("oracle-check", "Exhaustive randomization check on potential outcomes");
    add_common(*oracle, orc.common);
    add_rule(*oracle, orc.rule);
    oracle->add_option("--metric", orc.metric, "pav, pape or aupec")->capture_default_str();
    oracle->add_option("--y0-col", orc.y0_col, "Control potential outcome column")->capture_default_str();
    oracle->add_option("--y1-col", orc.y1_col, "Treated potential outcome column")->capture_default_str();
    oracle->add_option("--n1", orc.n1, "Treated units per assignment (default floor(n/2))");

    try {
        std::vector<std::string> args(argv, argv + argc);
        args = expand_config(args);
        std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
        app.parse(rev);

        if (*evaluate)
            return emit(ev.common, [&](std::ostream& o) { write_records(o, run_evaluate(ev), ev.common.json); });
        if (*compare)
            return emit(cmp.common, [&](std::ostream& o) { write_records(o, run_compare(cmp), cmp.common.json); });
        if (*crossval)
            return emit(cv.common, [&](std::ostream& o) { write_records(o, run_crossval(cv), cv.common.json); });
        if (*curve)
            return emit(crv.common, [&](std::ostream& o) { write_records(o, run_curve(crv), crv.common.json); });
        if (*simulate) return emit(sim.common, [&](std::ostream& o) { run_simulate(sim, o); });
        if (*oracle)
            return emit(orc.common, [&](std::ostream& o) { write_records(o, run_oracle_check(orc), orc.common.json); });
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const itreval::InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const itreval::DegenerateDataError& e) {
        std::cerr << "degenerate data: " << e.what() << '\n';
        return 3;
    } catch (const itreval::FitError& e) {
        std::cerr << "fit failed: " << e.what() << '\n';
        return 3;
    } catch (const itreval::SizeGuardError& e) {
        std::cerr << "size guard: " << e.what() << '\n';
        return 4;
    }
    return 2;
}
