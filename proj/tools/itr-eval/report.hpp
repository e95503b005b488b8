#pragma once

#include <ostream>
#include <string>

#include "json.hpp"
#include "itreval/estimate.hpp"

namespace itreval::cli {

using Record = nlohmann::ordered_json;

// Writes an object or an array of flat objects. CSV columns follow the key
// order of the first record; nulls become empty fields.
void write_records(std::ostream& out, const Record& records, bool json);

// metric, point, std_error, CI and the shared diagnostics of one estimate.
Record estimate_record(const MetricEstimate& est, double alpha);

}  // namespace itreval::cli
