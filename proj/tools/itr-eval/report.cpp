#include "report.hpp"

#include <iomanip>
#include <sstream>

#include "itreval/metrics.hpp"
#include "itreval/special.hpp"

namespace itreval::cli {

namespace {

std::string csv_field(const Record& v) {
    if (v.is_null()) return {};
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_float()) {
        std::ostringstream os;
        os << std::setprecision(12) << v.get<double>();
        return os.str();
    }
    if (v.is_number()) return v.dump();
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

}  // namespace

void write_records(std::ostream& out, const Record& records, bool json) {
    if (json) {
        out << records.dump(2) << '\n';
        return;
    }
    const Record rows = records.is_array() ? records : Record::array({records});
    if (rows.empty()) return;
    bool first = true;
    for (const auto& [key, _] : rows.front().items()) {
        out << (first ? "" : ",") << key;
        first = false;
    }
    out << '\n';
    for (const auto& row : rows) {
        first = true;
        for (const auto& [key, _] : rows.front().items()) {
            out << (first ? "" : ",") << (row.contains(key) ? csv_field(row[key]) : "");
            first = false;
        }
        out << '\n';
    }
}

Record estimate_record(const MetricEstimate& est, double alpha) {
    Record r;
    std::string name(metric_name(est.metric));
    r["metric"] = name;
    r["point"] = est.point;
    if (est.std_error) {
        const double z = normal_quantile(1.0 - alpha / 2.0);
        r["std_error"] = *est.std_error;
        r["ci_lower"] = est.point - z * *est.std_error;
        r["ci_upper"] = est.point + z * *est.std_error;
    } else {
        r["std_error"] = nullptr;
        r["ci_lower"] = nullptr;
        r["ci_upper"] = nullptr;
    }
    r["ci_level"] = 1.0 - alpha;
    r["proportion_treated"] = est.proportion_treated;
    r["n"] = est.n_used;
    r["variance_clamped"] = est.flagged(diag::kVarianceClamped);
    r["kappa_substituted"] = est.flagged(diag::kKappaSubstituted);
    return r;
}

}  // namespace itreval::cli
