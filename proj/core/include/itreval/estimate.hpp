#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace itreval {

enum class Metric { PAV, PAPE, PAPE_BUDGET, PAPD_BUDGET, AUPEC, AUPEC_NORM, VALUE_DIFF };

std::string_view metric_name(Metric m);

struct MetricEstimate {
    Metric metric = Metric::PAV;
    double point = 0.0;
    // Absent when an arm has fewer than two units.
    std::optional<double> std_error;
    std::size_t n_used = 0;
    double proportion_treated = 0.0;
    std::map<std::string, double> diagnostics;

    bool flagged(const std::string& key) const {
        auto it = diagnostics.find(key);
        return it != diagnostics.end() && it->second != 0.0;
    }
};

// Builds a standard error from an assembled variance, clamping negatives to
// zero and recording the clamp.
void set_variance(MetricEstimate& est, double variance);

}  // namespace itreval
