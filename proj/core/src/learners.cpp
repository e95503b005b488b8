#include "itreval/learners.hpp"

#include <algorithm>

#include <Eigen/Dense>

#include "itreval/errors.hpp"

namespace itreval {

std::string LearnerSpec::name() const {
    struct Visitor {
        std::string operator()(const ConstantScorer&) const { return "constant"; }
        std::string operator()(const DiffMeansByBin&) const { return "binned"; }
        std::string operator()(const LinearTLearner&) const { return "linear"; }
    };
    return std::visit(Visitor{}, kind);
}

namespace {

std::vector<double> ridge(const ExperimentData& d, int arm, double lambda) {
    const std::size_t p = d.x().cols + 1;
    std::size_t rows = arm ? d.n1() : d.n0();
    Eigen::MatrixXd X(rows, p);
    Eigen::VectorXd y(rows);
    std::size_t r = 0;
    for (std::size_t i = 0; i < d.n(); ++i) {
        if (d.t()[i] != arm) continue;
        X(r, 0) = 1.0;
        for (std::size_t j = 0; j + 1 < p; ++j) X(r, j + 1) = d.x().at(i, j);
        y(r) = d.y()[i];
        ++r;
    }
    Eigen::MatrixXd A = X.transpose() * X;
    // The intercept is not penalized.
    for (std::size_t j = 1; j < p; ++j) A(j, j) += lambda;
    Eigen::VectorXd b = X.transpose() * y;
    Eigen::VectorXd beta;
    if (lambda == 0.0) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
        if (rows < p || qr.rank() < static_cast<Eigen::Index>(p))
            throw FitError("singular design for the " + std::string(arm ? "treated" : "control") +
                           " arm; use a positive ridge penalty");
        beta = qr.solve(b);
    } else {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
        if (ldlt.info() != Eigen::Success || rows == 0)
            throw FitError("ridge system could not be factorized");
        beta = ldlt.solve(b);
    }
    return {beta.data(), beta.data() + beta.size()};
}

std::size_t bin_of(const std::vector<double>& cuts, double v) {
    return static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), v) - cuts.begin());
}

}  // namespace

FittedScorer fit(const LearnerSpec& spec, const ExperimentData& train) {
    FittedScorer out;
    if (auto* c = std::get_if<ConstantScorer>(&spec.kind)) {
        out.kind_ = FittedScorer::Kind::Constant;
        out.constant_ = c->scores;
        return out;
    }
    if (train.n1() == 0 || train.n0() == 0)
        throw FitError("training data need both treated and control units");
    if (auto* b = std::get_if<DiffMeansByBin>(&spec.kind)) {
        if (b->covariate >= train.x().cols) throw InputError("bin covariate index out of range");
        if (b->bins < 1) throw InputError("need at least one bin");
        out.kind_ = FittedScorer::Kind::Bins;
        out.covariate_ = b->covariate;
        std::vector<double> v(train.n());
        for (std::size_t i = 0; i < train.n(); ++i) v[i] = train.x().at(i, b->covariate);
        std::sort(v.begin(), v.end());
        for (std::size_t k = 1; k < b->bins; ++k) {
            const double c = v[std::min(v.size() - 1, k * v.size() / b->bins)];
            if (out.cuts_.empty() || c > out.cuts_.back()) out.cuts_.push_back(c);
        }
        const std::size_t nb = out.cuts_.size() + 1;
        std::vector<double> s1(nb, 0), s0(nb, 0);
        std::vector<std::size_t> c1(nb, 0), c0(nb, 0);
        for (std::size_t i = 0; i < train.n(); ++i) {
            const std::size_t k = bin_of(out.cuts_, train.x().at(i, b->covariate));
            if (train.t()[i]) {
                s1[k] += train.y()[i];
                ++c1[k];
            } else {
                s0[k] += train.y()[i];
                ++c0[k];
            }
        }
        const double ate = train.treated_mean() - train.control_mean();
        out.bin_effect_.resize(nb);
        for (std::size_t k = 0; k < nb; ++k)
            out.bin_effect_[k] = (c1[k] && c0[k]) ? s1[k] / c1[k] - s0[k] / c0[k] : ate;
        return out;
    }
    const auto& lin = std::get<LinearTLearner>(spec.kind);
    if (!(lin.lambda >= 0.0)) throw InputError("ridge penalty must be nonnegative");
    if (train.x().empty()) throw InputError("the linear T-learner needs covariates");
    out.kind_ = FittedScorer::Kind::Linear;
    out.beta1_ = ridge(train, 1, lin.lambda);
    out.beta0_ = ridge(train, 0, lin.lambda);
    return out;
}

std::vector<double> FittedScorer::score(const ExperimentData& eval) const {
    const std::size_t n = eval.n();
    std::vector<double> s(n);
    switch (kind_) {
        case Kind::Constant:
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t id = eval.ids()[i];
                if (id >= constant_.size())
                    throw InputError("constant scorer has no score for unit " + std::to_string(id));
                s[i] = constant_[id];
            }
            break;
        case Kind::Bins:
            if (covariate_ >= eval.x().cols) throw InputError("evaluation data lack the bin covariate");
            for (std::size_t i = 0; i < n; ++i)
                s[i] = bin_effect_[bin_of(cuts_, eval.x().at(i, covariate_))];
            break;
        case Kind::Linear:
            if (eval.x().cols + 1 != beta1_.size())
                throw InputError("evaluation covariates do not match the fitted model");
            for (std::size_t i = 0; i < n; ++i) {
                double v = beta1_[0] - beta0_[0];
                for (std::size_t j = 0; j < eval.x().cols; ++j)
                    v += (beta1_[j + 1] - beta0_[j + 1]) * eval.x().at(i, j);
                s[i] = v;
            }
            break;
    }
    return s;
}

}  // namespace itreval
