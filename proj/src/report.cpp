#include "varinv/report.hpp"

#include <cmath>
#include <cstdio>

namespace varinv {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

Verdict margin_verdict(double worst_margin, double tolerance) {
    if (std::isnan(worst_margin)) return Verdict::Inconclusive;
    return worst_margin < -tolerance ? Verdict::Fail : Verdict::Pass;
}

nlohmann::json report_to_json(const TestReport& r) {
    nlohmann::json j;
    j["condition"] = r.condition;
    j["verdict"] = to_string(r.verdict);
    j["margin"] = r.worst_margin;
    j["tolerance"] = r.tolerance;
    j["samples"] = r.samples;
    j["seed"] = r.seed;
    j["witness"] = r.witness;
    j["caveat"] = r.caveat;
    return j;
}

std::string report_csv(const TestReport& r) {
    std::string out = "sample,margin,tau,amplitude\n";
    char buf[128];
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", i, r.rows[i].margin,
                      r.rows[i].tau, r.rows[i].amplitude);
        out += buf;
    }
    return out;
}

} // namespace varinv
