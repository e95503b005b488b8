#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace itreval {

// Row-major n x d covariate matrix.
struct Covariates {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;
    std::vector<std::string> names;

    bool empty() const { return cols == 0; }
    double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
    std::span<const double> row(std::size_t i) const {
        return {values.data() + i * cols, cols};
    }
    Covariates subset(std::span<const std::size_t> idx) const;
};

// Observed data from a completely randomized experiment. Immutable once built.
class ExperimentData {
public:
    ExperimentData() = default;

    // Validates lengths, finiteness and 0/1 treatment. ids default to 0..n-1.
    static ExperimentData create(std::vector<double> y, std::vector<std::uint8_t> t,
                                 Covariates x = {}, std::vector<std::size_t> ids = {});

    std::size_t n() const { return y_.size(); }
    std::size_t n1() const { return n1_; }
    std::size_t n0() const { return n() - n1_; }
    const std::vector<double>& y() const { return y_; }
    const std::vector<std::uint8_t>& t() const { return t_; }
    const Covariates& x() const { return x_; }
    // Original unit identifiers; subsets keep the ids of the parent rows.
    const std::vector<std::size_t>& ids() const { return ids_; }

    double treated_mean() const;
    double control_mean() const;

    ExperimentData subset(std::span<const std::size_t> idx) const;
    ExperimentData with_outcomes(std::vector<double> y) const;
    ExperimentData with_treatment(std::vector<std::uint8_t> t) const;

private:
    std::vector<double> y_;
    std::vector<std::uint8_t> t_;
    Covariates x_;
    std::vector<std::size_t> ids_;
    std::size_t n1_ = 0;
};

struct ColumnSpec {
    std::string outcome = "y";
    std::string treatment = "t";
    // Extra numeric columns returned alongside the data (scores, fixed rules).
    std::vector<std::string> extra;
    std::vector<std::string> covariates;
};

struct ExperimentTable {
    ExperimentData data;
    std::map<std::string, std::vector<double>> columns;
};

ExperimentTable load_experiment(std::istream& csv, const ColumnSpec& spec);
ExperimentTable load_experiment_file(const std::string& path, const ColumnSpec& spec);
// Reads only the named numeric columns.
Covariates load_covariates(std::istream& csv, const std::vector<std::string>& columns);

struct CenteredData {
    ExperimentData data;
    double delta = 0.0;
};

// Shifts y so that treated mean + control mean = 0.
CenteredData center_outcomes(const ExperimentData& data);

}  // namespace itreval
