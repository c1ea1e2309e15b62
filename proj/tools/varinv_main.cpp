// Command-line front end: check one config, run a suite, or list what's built in.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "varinv/parallel.hpp"
#include "varinv/suite.hpp"
#include "varinv/version.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitUsage = 64;

std::optional<std::uint64_t> seed_from_env() {
    const char* s = std::getenv("VARINV_SEED");
    if (!s || !*s) return std::nullopt;
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        throw varinv::ConfigError(std::string("VARINV_SEED: not a non-negative integer: ") + s);
    }
}

nlohmann::json load_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw varinv::ConfigError(path + ": cannot open");
    try {
        return nlohmann::json::parse(is);
    } catch (const std::exception& e) {
        throw varinv::ConfigError(path + ": " + e.what());
    }
}

int run_check_cmd(const std::string& config_path) {
    const nlohmann::json cfg = load_json(config_path);
    auto runner = varinv::compile_check(cfg, seed_from_env());
    varinv::TestReport rep;
    try {
        rep = runner();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInconclusive;
    }
    std::cout << varinv::report_to_json(rep).dump(2) << "\n";
    switch (rep.verdict) {
        case varinv::Verdict::Pass: return kExitPass;
        case varinv::Verdict::Fail: return kExitFail;
        case varinv::Verdict::Inconclusive: return kExitInconclusive;
    }
    return kExitInconclusive;
}

int run_suite_cmd(const std::string& suite_path, const std::string& out_dir) {
    const nlohmann::json suite = load_json(suite_path);
    const varinv::SuiteResult res = varinv::run_suite(suite, out_dir, seed_from_env());
    for (const auto& e : res.entries) {
        std::cout << (e.matched ? "ok   " : "MISMATCH ") << e.id << ": got "
                  << varinv::to_string(e.verdict) << ", expected "
                  << varinv::to_string(e.expected);
        if (!e.caveat.empty()) std::cout << " (" << e.caveat << ")";
        std::cout << "\n";
    }
    std::cout << res.matched << "/" << res.entries.size() << " entries matched, reports in "
              << out_dir << "\n";
    if (res.ok()) return kExitPass;
    // Mismatches that are merely inconclusive rank below definite wrong verdicts.
    return res.inconclusive_mismatches == res.mismatched ? kExitInconclusive : kExitFail;
}

} // namespace

int main(int argc, char** argv) {
    if (const char* s = std::getenv("VARINV_SERIAL"); s && *s && std::string(s) != "0")
        varinv::exec_mode() = varinv::ExecMode::Serial;
    CLI::App app{"varinv: group-relative convexity and invariance checks for energy "
                 "densities W(x, y, F)"};
    app.set_version_flag("--version", VARINV_VERSION);
    app.require_subcommand(1);

    std::string config_path;
    std::string suite_path;
    std::string out_dir = "reports";

    CLI::App* check = app.add_subcommand("check", "Run one check from a JSON config");
    check->add_option("config", config_path, "path to the check config")->required();

    CLI::App* suite = app.add_subcommand("suite", "Run every entry of a suite file");
    suite->add_option("suite", suite_path, "path to the suite file")->required();
    suite->add_option("--out", out_dir, "directory for per-entry reports");

    CLI::App* list = app.add_subcommand("list", "List conditions, groups and densities");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*check) return run_check_cmd(config_path);
        if (*suite) return run_suite_cmd(suite_path, out_dir);
        if (*list) {
            std::cout << varinv::listing_text();
            std::cout << "\nexecution: "
                      << (varinv::openmp_enabled() ? "OpenMP kernels (set VARINV_SERIAL=1 to "
                                                     "force the serial reference)"
                                                   : "serial reference build")
                      << "\n";
            return kExitPass;
        }
    } catch (const varinv::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInconclusive;
    }
    return kExitUsage;
}
