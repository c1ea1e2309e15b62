#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "varinv_cli_test";

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

RunResult run(const std::string& args, const std::string& env = "") {
    fs::create_directories(kWork);
    const fs::path out = kWork / "stdout.txt";
    const fs::path err = kWork / "stderr.txt";
    const std::string cmd = env + (env.empty() ? "" : " ") + std::string(VARINV_BIN) + " " +
                            args + " > " + out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

fs::path write_json(const char* name, const json& j) {
    fs::create_directories(kWork);
    const fs::path p = kWork / name;
    std::ofstream os(p);
    os << j.dump(2) << "\n";
    return p;
}

json quick_pass_config() {
    return json{{"condition", "parhl"}, {"n", 2}, {"energy", {{"name", "det"}}}, {"seed", 9}};
}

json quick_fail_config() {
    return json{{"condition", "parhl"},
                {"n", 2},
                {"energy", {{"name", "frobenius2"}}},
                {"seed", 9}};
}

} // namespace

TEST_CASE("check maps verdicts to exit codes") {
    const fs::path pass = write_json("pass.json", quick_pass_config());
    const RunResult ok = run("check " + pass.string());
    CHECK(ok.exit_code == 0);
    const json rep = json::parse(ok.out);
    CHECK(rep["condition"] == "parhl");
    CHECK(rep["verdict"] == "pass");
    CHECK(rep["seed"] == 9);

    const fs::path fail = write_json("fail.json", quick_fail_config());
    CHECK(run("check " + fail.string()).exit_code == 1);
}

TEST_CASE("config errors exit 64") {
    const fs::path bad = write_json("bad.json", json{{"condition", "wat"}, {"n", 2}});
    const RunResult r = run("check " + bad.string());
    CHECK(r.exit_code == 64);
    CHECK(r.err.find("config error") != std::string::npos);
    // unreadable file and unparsable file too
    CHECK(run("check /no/such/file.json").exit_code == 64);
    const fs::path garbage = kWork / "garbage.json";
    std::ofstream(garbage) << "{not json";
    CHECK(run("check " + garbage.string()).exit_code == 64);
    // so does bare misuse
    CHECK(run("").exit_code == 64);
    CHECK(run("frobnicate").exit_code == 64);
}

TEST_CASE("runtime failures exit 2") {
    const fs::path cfg = write_json(
        "boom.json", json{{"condition", "parhl"},
                          {"n", 2},
                          {"energy", {{"name", "logdet"}}},
                          {"jet", {{-1.0, 0.0}, {0.0, 1.0}}}});
    const RunResult r = run("check " + cfg.string());
    CHECK(r.exit_code == 2);
    CHECK(!r.err.empty());
}

TEST_CASE("seed override via environment") {
    const fs::path cfg = write_json("seeded.json", quick_pass_config());
    const RunResult r = run("check " + cfg.string(), "VARINV_SEED=4242");
    CHECK(r.exit_code == 0);
    CHECK(json::parse(r.out)["seed"] == 4242);
    CHECK(run("check " + cfg.string(), "VARINV_SEED=nope").exit_code == 64);
}

TEST_CASE("list prints the built-in tables") {
    const RunResult r = run("list");
    CHECK(r.exit_code == 0);
    for (const char* needle : {"quasiconvexity", "conditions:", "groups:", "densities:",
                               "frobenius2", "volume_preserving", "execution:"})
        CHECK(r.out.find(needle) != std::string::npos);
    CHECK(run("--version").exit_code == 0);
}

TEST_CASE("suite subcommand writes reports and summarizes") {
    const json suite{
        {"name", "cli"},
        {"entries",
         {{{"id", "good"}, {"config", quick_pass_config()}},
          {{"id", "bad"}, {"expect", "fail"}, {"config", quick_fail_config()}}}}};
    const fs::path sj = write_json("suite.json", suite);
    const fs::path out_dir = kWork / "reports";
    fs::remove_all(out_dir);
    const RunResult r = run("suite " + sj.string() + " --out " + out_dir.string());
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(out_dir / "good.report.json"));
    CHECK(fs::exists(out_dir / "good.samples.csv"));
    CHECK(fs::exists(out_dir / "bad.report.json"));
    CHECK(fs::exists(out_dir / "suite_summary.json"));
    CHECK(r.out.find("2/2") != std::string::npos);

    // a wrong expectation drives the exit code to 1
    json wrong = suite;
    wrong["entries"][1]["expect"] = "pass";
    const fs::path wj = write_json("suite_wrong.json", wrong);
    const RunResult rw = run("suite " + wj.string() + " --out " + (kWork / "r2").string());
    CHECK(rw.exit_code == 1);
    CHECK(rw.out.find("MISMATCH") != std::string::npos);

    // runtime errors surface as inconclusive-only mismatches: exit 2
    json hurt = suite;
    hurt["entries"][0]["config"] = json{{"condition", "parhl"},
                                        {"n", 2},
                                        {"energy", {{"name", "logdet"}}},
                                        {"jet", {{-1.0, 0.0}, {0.0, 1.0}}}};
    const fs::path hj = write_json("suite_hurt.json", hurt);
    const RunResult rh = run("suite " + hj.string() + " --out " + (kWork / "r3").string());
    CHECK(rh.exit_code == 2);

    // malformed suite files exit 64 before any entry runs
    const fs::path ej = write_json("suite_empty.json", json{{"entries", json::array()}});
    CHECK(run("suite " + ej.string() + " --out " + (kWork / "r4").string()).exit_code == 64);
}

TEST_CASE("shipped acceptance suite parses") {
    // not run here (the acceptance binary covers that); just validated
    const fs::path shipped = fs::path(VARINV_SUITE_DIR) / "acceptance.json";
    REQUIRE(fs::exists(shipped));
    const json suite = json::parse(slurp(shipped));
    CHECK(suite["name"] == "acceptance");
    CHECK(suite["entries"].is_array());
    CHECK(suite["entries"].size() >= 15);
}
