#include "itreval/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "itreval/errors.hpp"

namespace itreval {

Covariates Covariates::subset(std::span<const std::size_t> idx) const {
    Covariates out;
    out.cols = cols;
    out.names = names;
    if (cols == 0) return out;
    out.rows = idx.size();
    out.values.reserve(idx.size() * cols);
    for (std::size_t i : idx) {
        auto r = row(i);
        out.values.insert(out.values.end(), r.begin(), r.end());
    }
    return out;
}

ExperimentData ExperimentData::create(std::vector<double> y, std::vector<std::uint8_t> t,
                                      Covariates x, std::vector<std::size_t> ids) {
    if (y.size() != t.size())
        throw InputError("outcome and treatment lengths differ");
    for (double v : y)
        if (!std::isfinite(v)) throw InputError("non-finite outcome");
    std::size_t n1 = 0;
    for (auto v : t) {
        if (v > 1) throw InputError("treatment must be 0 or 1");
        n1 += v;
    }
    if (!x.empty()) {
        if (x.rows != y.size() || x.values.size() != x.rows * x.cols)
            throw InputError("covariate matrix shape does not match outcomes");
        for (double v : x.values)
            if (!std::isfinite(v)) throw InputError("non-finite covariate");
    }
    if (ids.empty()) {
        ids.resize(y.size());
        std::iota(ids.begin(), ids.end(), std::size_t{0});
    } else if (ids.size() != y.size()) {
        throw InputError("id vector length does not match outcomes");
    }
    ExperimentData d;
    d.y_ = std::move(y);
    d.t_ = std::move(t);
    d.x_ = std::move(x);
    d.ids_ = std::move(ids);
    d.n1_ = n1;
    return d;
}

double ExperimentData::treated_mean() const {
    if (n1_ == 0) throw DegenerateDataError("no treated units");
    double s = 0.0;
    for (std::size_t i = 0; i < n(); ++i)
        if (t_[i]) s += y_[i];
    return s / static_cast<double>(n1_);
}

double ExperimentData::control_mean() const {
    if (n0() == 0) throw DegenerateDataError("no control units");
    double s = 0.0;
    for (std::size_t i = 0; i < n(); ++i)
        if (!t_[i]) s += y_[i];
    return s / static_cast<double>(n0());
}

ExperimentData ExperimentData::subset(std::span<const std::size_t> idx) const {
    std::vector<double> y;
    std::vector<std::uint8_t> t;
    std::vector<std::size_t> ids;
    y.reserve(idx.size());
    t.reserve(idx.size());
    ids.reserve(idx.size());
    for (std::size_t i : idx) {
        if (i >= n()) throw InputError("subset index out of range");
        y.push_back(y_[i]);
        t.push_back(t_[i]);
        ids.push_back(ids_[i]);
    }
    return create(std::move(y), std::move(t), x_.subset(idx), std::move(ids));
}

ExperimentData ExperimentData::with_outcomes(std::vector<double> y) const {
    return create(std::move(y), t_, x_, ids_);
}

ExperimentData ExperimentData::with_treatment(std::vector<std::uint8_t> t) const {
    return create(y_, std::move(t), x_, ids_);
}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\"");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r\"");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

double parse_real(const std::string& field, std::size_t row, const std::string& col) {
    if (field.empty())
        throw InputError("row " + std::to_string(row) + ": missing value in column '" + col + "'");
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(field, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != field.size() || !std::isfinite(v))
        throw InputError("row " + std::to_string(row) + ": column '" + col +
                         "' is not a finite number: '" + field + "'");
    return v;
}

}  // namespace

ExperimentTable load_experiment(std::istream& csv, const ColumnSpec& spec) {
    std::string line;
    std::vector<std::string> header;
    while (std::getline(csv, line)) {
        if (!trim(line).empty()) {
            header = split_csv(line);
            break;
        }
    }
    if (header.empty()) throw DegenerateDataError("empty input: no header row");

    auto find_col = [&](const std::string& name) {
        for (std::size_t j = 0; j < header.size(); ++j)
            if (header[j] == name) return j;
        throw InputError("missing column '" + name + "'");
    };
    const std::size_t jy = find_col(spec.outcome);
    const std::size_t jt = find_col(spec.treatment);
    std::vector<std::size_t> jextra, jx;
    for (const auto& c : spec.extra) jextra.push_back(find_col(c));
    for (const auto& c : spec.covariates) jx.push_back(find_col(c));

    std::vector<double> y;
    std::vector<std::uint8_t> t;
    std::vector<std::vector<double>> extra(spec.extra.size());
    Covariates x;
    x.cols = jx.size();
    x.names = spec.covariates;

    std::size_t row = 1;
    while (std::getline(csv, line)) {
        ++row;
        if (trim(line).empty()) continue;
        auto f = split_csv(line);
        auto get = [&](std::size_t j) -> const std::string& {
            static const std::string none;
            return j < f.size() ? f[j] : none;
        };
        y.push_back(parse_real(get(jy), row, spec.outcome));
        const std::string& tv = get(jt);
        if (tv == "1") {
            t.push_back(1);
        } else if (tv == "0") {
            t.push_back(0);
        } else if (tv.empty()) {
            throw InputError("row " + std::to_string(row) + ": missing value in column '" +
                             spec.treatment + "'");
        } else {
            throw InputError("row " + std::to_string(row) + ": treatment must be 0 or 1, got '" +
                             tv + "'");
        }
        for (std::size_t k = 0; k < jextra.size(); ++k)
            extra[k].push_back(parse_real(get(jextra[k]), row, spec.extra[k]));
        for (std::size_t k = 0; k < jx.size(); ++k)
            x.values.push_back(parse_real(get(jx[k]), row, spec.covariates[k]));
    }
    x.rows = x.cols ? y.size() : 0;

    if (y.empty()) throw DegenerateDataError("empty input: no data rows");
    std::size_t n1 = 0;
    for (auto v : t) n1 += v;
    if (n1 < 2 || y.size() - n1 < 2)
        throw DegenerateDataError("need at least 2 treated and 2 control units (got " +
                                  std::to_string(n1) + " treated, " +
                                  std::to_string(y.size() - n1) + " control)");

    ExperimentTable out;
    out.data = ExperimentData::create(std::move(y), std::move(t), std::move(x));
    for (std::size_t k = 0; k < spec.extra.size(); ++k)
        out.columns[spec.extra[k]] = std::move(extra[k]);
    return out;
}

ExperimentTable load_experiment_file(const std::string& path, const ColumnSpec& spec) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    return load_experiment(in, spec);
}

Covariates load_covariates(std::istream& csv, const std::vector<std::string>& columns) {
    std::string line;
    std::vector<std::string> header;
    while (std::getline(csv, line)) {
        if (!trim(line).empty()) {
            header = split_csv(line);
            break;
        }
    }
    if (header.empty()) throw InputError("covariate file has no header row");
    std::vector<std::size_t> jx;
    for (const auto& c : columns) {
        auto it = std::find(header.begin(), header.end(), c);
        if (it == header.end()) throw InputError("missing covariate column '" + c + "'");
        jx.push_back(static_cast<std::size_t>(it - header.begin()));
    }
    Covariates x;
    x.cols = columns.size();
    x.names = columns;
    std::size_t row = 1;
    while (std::getline(csv, line)) {
        ++row;
        if (trim(line).empty()) continue;
        auto f = split_csv(line);
        for (std::size_t k = 0; k < jx.size(); ++k) {
            static const std::string none;
            x.values.push_back(parse_real(jx[k] < f.size() ? f[jx[k]] : none, row, columns[k]));
        }
        ++x.rows;
    }
    if (x.rows == 0) throw InputError("covariate file has no data rows");
    return x;
}

CenteredData center_outcomes(const ExperimentData& data) {
    const double delta = -0.5 * (data.treated_mean() + data.control_mean());
    if (delta == 0.0) return {data, 0.0};
    std::vector<double> y = data.y();
    for (double& v : y) v += delta;
    return {data.with_outcomes(std::move(y)), delta};
}

}  // namespace itreval
