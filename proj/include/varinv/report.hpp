#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace varinv {

enum class Verdict { Pass, Fail, Inconclusive };

const char* to_string(Verdict v);

/// Per-sample record kept for CSV export.
struct SampleRow {
    double margin = 0.0;
    double tau = 0.0;        // 0 for samples with no flow parameter
    double amplitude = 0.0;  // leading bump amplitude, 0 when not applicable
};

/// Outcome of one condition check.  worst_margin uses one convention for
/// both test families: inequality checks store the smallest normalized
/// margin (negative = violated), identity checks store minus the largest
/// absolute deviation.  Either way, fail means  worst_margin < -tolerance.
struct TestReport {
    std::string condition;
    Verdict verdict = Verdict::Inconclusive;
    double worst_margin = 0.0;
    double tolerance = 0.0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    nlohmann::json witness = nlohmann::json::object();
    std::string caveat;
    std::vector<SampleRow> rows;   // not serialized to JSON; see report_csv
};

/// Pass unless the margin dips below -tolerance; NaN is inconclusive.
Verdict margin_verdict(double worst_margin, double tolerance);

/// Stable JSON form (alphabetical keys, shortest round-trip numbers), so
/// identical runs produce byte-identical files.
nlohmann::json report_to_json(const TestReport& r);

/// "sample,margin,tau,amplitude" with one row per sample, %.17g, LF endings.
std::string report_csv(const TestReport& r);

} // namespace varinv
