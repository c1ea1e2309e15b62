#pragma once
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "varinv/report.hpp"

#include "json.hpp"

namespace varinv {

/// Malformed configuration (unknown keys, wrong types, bad ranges).  The
/// message always names the offending key path.  The CLI maps this to exit
/// code 64; runtime failures while checking map to an inconclusive verdict.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Validates a check configuration and returns a runner for it without
/// executing anything.  All validation errors surface here, which is what
/// lets a suite reject a broken entry before spending time on earlier ones.
std::function<TestReport()> compile_check(const nlohmann::json& config,
                                          std::optional<std::uint64_t> seed_override);

/// compile + run in one step.
TestReport run_check(const nlohmann::json& config,
                     std::optional<std::uint64_t> seed_override = std::nullopt);

struct SuiteEntryResult {
    std::string id;
    Verdict verdict = Verdict::Inconclusive;
    Verdict expected = Verdict::Pass;
    bool matched = false;
    double worst_margin = 0.0;
    std::string config_digest;   // FNV-1a 64 of the entry's config text, hex
    std::string caveat;
};

struct SuiteResult {
    std::string name;
    std::vector<SuiteEntryResult> entries;
    int matched = 0;
    int mismatched = 0;
    int inconclusive_mismatches = 0;
    double duration_seconds = 0.0;

    bool ok() const { return mismatched == 0; }
};

/// Runs every entry of a suite file, writing <id>.report.json and
/// <id>.samples.csv into out_dir plus a suite_summary.json.  All entries are
/// compiled up front; any config error aborts before the first run.  Report
/// and CSV bytes depend only on the configs and seeds (the summary also
/// carries the wall-clock duration, so only the summary is time-dependent).
SuiteResult run_suite(const nlohmann::json& suite, const std::string& out_dir,
                      std::optional<std::uint64_t> seed_override = std::nullopt);

nlohmann::json suite_result_to_json(const SuiteResult& r);

/// 64-bit FNV-1a of a byte string.
std::uint64_t fnv1a64(const std::string& bytes);

/// Human-oriented tables for the `list` subcommand: conditions, groups,
/// density catalog.
std::string listing_text();

} // namespace varinv
