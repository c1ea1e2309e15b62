#include "varinv/suite.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "varinv/jsonio.hpp"
#include "varinv/testers.hpp"
#include "varinv/version.hpp"

namespace varinv {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

std::string str_at(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

double num_at(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

int int_at(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
}

double num_or(const json& obj, const char* key, double def, const std::string& path) {
    if (!obj.contains(key)) return def;
    return num_at(obj[key], path + "." + key);
}

int int_or(const json& obj, const char* key, int def, const std::string& path) {
    if (!obj.contains(key)) return def;
    return int_at(obj[key], path + "." + key);
}

bool bool_or(const json& obj, const char* key, bool def, const std::string& path) {
    if (!obj.contains(key)) return def;
    if (!obj[key].is_boolean()) fail(path + "." + key, "expected a boolean");
    return obj[key].get<bool>();
}

std::uint64_t seed_or(const json& obj, const char* key, std::uint64_t def,
                      const std::string& path) {
    if (!obj.contains(key)) return def;
    const json& j = obj[key];
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() &&
                                   j.get<long long>() < 0))
        fail(path + "." + key, "expected a non-negative integer");
    return j.get<std::uint64_t>();
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& path) {
    for (const auto& el : obj.items())
        if (allowed.find(el.key()) == allowed.end())
            fail(path + "." + el.key(), "unknown key");
}

GroupSpec parse_group(const json& j, int n, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    reject_unknown_keys(j, {"kind", "p", "q", "tolerance"}, path);
    const std::string kind = str_at(j.contains("kind") ? j["kind"] : json(), path + ".kind");
    try {
        GroupSpec g;
        if (kind == "full_diff") g = GroupSpec::full_diff(n);
        else if (kind == "volume_preserving") g = GroupSpec::volume_preserving(n);
        else if (kind == "symplectic_2d") {
            if (n != 2) fail(path + ".kind", "symplectic_2d needs n = 2");
            g = GroupSpec::symplectic_2d();
        } else if (kind == "shear") {
            const int p = int_or(j, "p", 1, path);
            const int q = int_or(j, "q", 2, path);
            if (p < 1 || p > n || q < 1 || q > n)
                fail(path, "p and q must be 1-based axis indices");
            g = GroupSpec::shear(n, p - 1, q - 1);
        } else if (kind == "separable_1d") {
            if (n != 1) fail(path + ".kind", "separable_1d needs n = 1");
            g = GroupSpec::separable_1d();
        } else
            fail(path + ".kind", "unknown group '" + kind + "'");
        if (j.contains("tolerance")) g.tolerance = num_at(j["tolerance"], path + ".tolerance");
        return g;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        fail(path, e.what());
    }
}

BoxDomain parse_domain(const json& cfg, int n, const std::string& path,
                       bool allow_resolution = true, int default_cells = 0) {
    json j = cfg.contains("domain") ? cfg["domain"] : json::object();
    if (!j.is_object()) fail(path, "expected an object");
    reject_unknown_keys(j, {"box", "cells", "order"}, path);
    Box box = Box::unit_cube(n);
    if (j.contains("box")) {
        const json& b = j["box"];
        if (!b.is_object()) fail(path + ".box", "expected an object");
        reject_unknown_keys(b, {"lo", "hi"}, path + ".box");
        try {
            box = Box(vec_from_json(b.contains("lo") ? b["lo"] : json(), n, path + ".box.lo"),
                      vec_from_json(b.contains("hi") ? b["hi"] : json(), n, path + ".box.hi"));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            fail(path + ".box", e.what());
        }
    }
    if (!allow_resolution && (j.contains("cells") || j.contains("order")))
        fail(path, "cells/order are fixed for this condition");
    if (default_cells == 0) default_cells = n == 3 ? 5 : 8;
    const int cells = int_or(j, "cells", default_cells, path);
    const int order = int_or(j, "order", 6, path);
    if (cells < 1 || cells > 64) fail(path + ".cells", "expected 1..64");
    if (order < 1 || order > 16) fail(path + ".order", "expected 1..16");
    try {
        return BoxDomain(box, cells, order);
    } catch (const std::exception& e) {
        fail(path, e.what());
    }
}

EnergyDensity parse_energy(const json& cfg, int n, const std::string& path) {
    if (!cfg.contains("energy")) fail(path, "required");
    const json& j = cfg["energy"];
    if (!j.is_object()) fail(path, "expected an object");
    reject_unknown_keys(j, {"name", "params"}, path);
    const std::string name = str_at(j.contains("name") ? j["name"] : json(), path + ".name");
    try {
        return catalog_get(name, j.contains("params") ? j["params"] : json(), n);
    } catch (const std::exception& e) {
        fail(path, e.what());
    }
}

Mat parse_jet(const json& cfg, int n, const std::string& path) {
    if (!cfg.contains("jet")) return Mat::identity(n);
    try {
        Mat f = mat_from_json(cfg["jet"], n, path);
        return f;
    } catch (const std::exception& e) {
        fail(path, e.what());
    }
}

struct FlowParams {
    int count = 20;
    double tau_lo = 0.1, tau_hi = 0.3;
    int steps_per_unit = 1000;
};

FlowParams parse_flows(const json& cfg, const std::string& path, int default_count) {
    FlowParams p;
    p.count = default_count;
    if (!cfg.contains("flows")) return p;
    const json& j = cfg["flows"];
    if (!j.is_object()) fail(path, "expected an object");
    reject_unknown_keys(j, {"count", "tau", "steps_per_unit"}, path);
    p.count = int_or(j, "count", default_count, path);
    if (p.count < 0 || p.count > 10000) fail(path + ".count", "expected 0..10000");
    if (j.contains("tau")) {
        const json& t = j["tau"];
        if (!t.is_array() || t.size() != 2) fail(path + ".tau", "expected [lo, hi]");
        p.tau_lo = num_at(t[0], path + ".tau[0]");
        p.tau_hi = num_at(t[1], path + ".tau[1]");
        if (!(p.tau_lo >= 0.0) || !(p.tau_hi >= p.tau_lo))
            fail(path + ".tau", "need 0 <= lo <= hi");
    }
    p.steps_per_unit = int_or(j, "steps_per_unit", 1000, path);
    if (p.steps_per_unit < 10 || p.steps_per_unit > 100000)
        fail(path + ".steps_per_unit", "expected 10..100000");
    return p;
}

std::vector<Mat> parse_jets(const json& cfg, int n, std::uint64_t seed,
                            const std::string& path, int default_random) {
    bool include_identity = true;
    int random = default_random;
    std::vector<Mat> jets;
    if (cfg.contains("jets")) {
        const json& j = cfg["jets"];
        if (!j.is_object()) fail(path, "expected an object");
        reject_unknown_keys(j, {"include_identity", "random", "explicit"}, path);
        include_identity = bool_or(j, "include_identity", true, path);
        random = int_or(j, "random", default_random, path);
        if (random < 0 || random > 1000) fail(path + ".random", "expected 0..1000");
        if (j.contains("explicit")) {
            const json& ex = j["explicit"];
            if (!ex.is_array()) fail(path + ".explicit", "expected an array of matrices");
            for (std::size_t i = 0; i < ex.size(); ++i) {
                try {
                    jets.push_back(mat_from_json(ex[i], n,
                                                 path + ".explicit[" + std::to_string(i) + "]"));
                } catch (const ConfigError&) {
                    throw;
                } catch (const std::exception& e) {
                    fail(path + ".explicit[" + std::to_string(i) + "]", e.what());
                }
            }
        }
    }
    std::vector<Mat> out = sample_jets(GroupSpec::full_diff(n), random, seed, include_identity);
    out.insert(out.end(), jets.begin(), jets.end());
    return out;
}

DeformationMap parse_map(const json& cfg, int n, const std::string& path) {
    if (!cfg.contains("map")) fail(path, "required");
    const json& j = cfg["map"];
    if (!j.is_object()) fail(path, "expected an object");
    reject_unknown_keys(j, {"kind", "offset", "linear", "bumps", "quadratic"}, path);
    const std::string kind =
        j.contains("kind") ? str_at(j["kind"], path + ".kind") : std::string("affine");
    Vec b = Vec::zero(n);
    if (j.contains("offset")) b = vec_from_json(j["offset"], n, path + ".offset");
    Mat F = Mat::identity(n);
    if (j.contains("linear")) {
        try {
            F = mat_from_json(j["linear"], n, path + ".linear");
        } catch (const std::exception& e) {
            fail(path + ".linear", e.what());
        }
    }
    try {
        if (kind == "affine") return DeformationMap::affine(b, F);
        if (kind == "affine_bump") {
            std::vector<ComponentBump> bumps;
            if (j.contains("bumps")) {
                const json& bs = j["bumps"];
                if (!bs.is_array()) fail(path + ".bumps", "expected an array");
                for (std::size_t i = 0; i < bs.size(); ++i) {
                    const json& e = bs[i];
                    const std::string p =
                        path + ".bumps[" + std::to_string(i) + "]";
                    if (!e.is_object()) fail(p, "expected an object");
                    reject_unknown_keys(e, {"component", "center", "radius", "amplitude"}, p);
                    ComponentBump cb;
                    cb.component = int_or(e, "component", 1, p) - 1;   // 1-based in configs
                    cb.bump = BumpProfile(
                        vec_from_json(e.contains("center") ? e["center"] : json(), n,
                                      p + ".center"),
                        num_or(e, "radius", 0.0, p), num_or(e, "amplitude", 0.0, p));
                    bumps.push_back(cb);
                }
            }
            return DeformationMap::affine_bump(b, F, std::move(bumps));
        }
        if (kind == "quadratic") {
            Rank3 q(n);
            if (j.contains("quadratic")) {
                const json& qq = j["quadratic"];
                if (!qq.is_array() || static_cast<int>(qq.size()) != n)
                    fail(path + ".quadratic", "expected n matrices");
                for (int i = 0; i < n; ++i) {
                    const Mat qi = mat_from_json(qq[static_cast<std::size_t>(i)], n,
                                                 path + ".quadratic[" + std::to_string(i) + "]");
                    for (int a = 0; a < n; ++a)
                        for (int c = 0; c < n; ++c) q(i, a, c) = qi(a, c);
                }
            }
            return DeformationMap::quadratic(b, F, q);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        fail(path, e.what());
    }
    fail(path + ".kind", "unknown map kind '" + kind + "'");
}

double default_tolerance(const std::string& cond) {
    if (cond == "null_lagrangian" || cond == "first_variation" ||
        cond == "equilibrium_residual")
        return 1e-6;
    if (cond == "character_nll" || cond == "conjugation_identity" || cond == "legh_identity")
        return 1e-7;
    if (cond == "legh" || cond == "parhl") return 1e-10;
    if (cond == "exp_invariance") return 1e-8;
    return 1e-9;
}

const std::set<std::string> kCommonKeys = {"condition", "n", "seed", "tolerance"};

std::set<std::string> with_common(std::initializer_list<const char*> extra) {
    std::set<std::string> s = kCommonKeys;
    for (const char* e : extra) s.insert(e);
    return s;
}

} // namespace

std::function<TestReport()> compile_check(const json& cfg,
                                          std::optional<std::uint64_t> seed_override) {
    if (!cfg.is_object()) fail("config", "expected an object");
    if (!cfg.contains("condition")) fail("config.condition", "required");
    const std::string cond = str_at(cfg["condition"], "config.condition");
    const bool is_theta = cond == "theta_convexity";
    int n = int_or(cfg, "n", is_theta ? 1 : 0, "config");
    if (!cfg.contains("n") && !is_theta) fail("config.n", "required");
    if (n < 1 || n > kMaxDim) fail("config.n", "expected 1, 2 or 3");
    const std::uint64_t seed =
        seed_override ? *seed_override : seed_or(cfg, "seed", 0x5EED2026ULL, "config");
    const double tol = num_or(cfg, "tolerance", default_tolerance(cond), "config");
    if (!(tol > 0.0)) fail("config.tolerance", "must be positive");

    auto finish = [seed](TestReport r) {
        r.seed = seed;
        return r;
    };

    if (cond == "lower_invariance_left" || cond == "lower_invariance_right") {
        reject_unknown_keys(cfg, with_common({"group", "energy", "domain", "jets", "flows"}),
                            "config");
        if (!cfg.contains("group")) fail("config.group", "required");
        const GroupSpec g = parse_group(cfg["group"], n, "config.group");
        const EnergyDensity w = parse_energy(cfg, n, "config.energy");
        const BoxDomain dom = parse_domain(cfg, n, "config.domain");
        const FlowParams fp = parse_flows(cfg, "config.flows", 20);
        const std::vector<Mat> jets = parse_jets(cfg, n, substream(seed, 2), "config.jets", 3);
        const Side side = cond == "lower_invariance_left" ? Side::Left : Side::Right;
        return [=]() {
            const FlowEnsemble ens = make_flow_ensemble(g, dom, fp.count, substream(seed, 1),
                                                        fp.tau_lo, fp.tau_hi, fp.steps_per_unit);
            return finish(test_lower_invariance(w, dom, jets, ens, side, tol));
        };
    }
    if (cond == "quasiconvexity") {
        reject_unknown_keys(
            cfg, with_common({"energy", "jet", "domain", "route", "samples", "group", "flows",
                              "refine"}),
            "config");
        const EnergyDensity w = parse_energy(cfg, n, "config.energy");
        const Mat F = parse_jet(cfg, n, "config.jet");
        const BoxDomain dom = parse_domain(cfg, n, "config.domain");
        const std::string route =
            cfg.contains("route") ? str_at(cfg["route"], "config.route") : std::string("fields");
        if (route == "fields") {
            const int samples = int_or(cfg, "samples", 100, "config");
            if (samples < 1 || samples > 100000) fail("config.samples", "expected 1..100000");
            const bool refine = bool_or(cfg, "refine", true, "config");
            return [=]() {
                return finish(
                    test_quasiconvexity(w, F, dom, samples, substream(seed, 3), tol, refine));
            };
        }
        if (route == "flows") {
            const GroupSpec g = cfg.contains("group")
                                    ? parse_group(cfg["group"], n, "config.group")
                                    : GroupSpec::full_diff(n);
            const FlowParams fp = parse_flows(cfg, "config.flows", 20);
            return [=]() {
                const FlowEnsemble ens = make_flow_ensemble(
                    g, dom, fp.count, substream(seed, 1), fp.tau_lo, fp.tau_hi,
                    fp.steps_per_unit);
                return finish(test_quasiconvexity(w, F, dom, ens, tol));
            };
        }
        fail("config.route", "expected 'fields' or 'flows'");
    }
    if (cond == "null_lagrangian") {
        reject_unknown_keys(cfg, with_common({"group", "energy", "domain", "jets", "flows"}),
                            "config");
        const GroupSpec g = cfg.contains("group") ? parse_group(cfg["group"], n, "config.group")
                                                  : GroupSpec::full_diff(n);
        const EnergyDensity w = parse_energy(cfg, n, "config.energy");
        const BoxDomain dom = parse_domain(cfg, n, "config.domain");
        const FlowParams fp = parse_flows(cfg, "config.flows", 20);
        const std::vector<Mat> jets = parse_jets(cfg, n, substream(seed, 2), "config.jets", 3);
        return [=]() {
            const FlowEnsemble ens = make_flow_ensemble(g, dom, fp.count, substream(seed, 1),
                                                        fp.tau_lo, fp.tau_hi, fp.steps_per_unit);
            return finish(test_null_lagrangian(w, dom, jets, ens, tol));
        };
    }
    if (cond == "character_nll") {
        reject_unknown_keys(cfg, with_common({"character", "domain", "jets", "flows"}),
                            "config");
        if (!cfg.contains("character")) fail("config.character", "required");
        CharacterSpec chi = CharacterSpec::shear_exp(2, 1.0, 0, 1);
        try {
            chi = character_from_json(cfg["character"], n);
        } catch (const std::exception& e) {
            fail("config.character", e.what());
        }
        if (chi.kind == CharacterKind::DiagonalPower)
            fail("config.character.kind",
                 "diagonal_power has no flow family; use shear_exp");
        const GroupSpec g = chi.group();
        const BoxDomain dom = parse_domain(cfg, n, "config.domain");
        const FlowParams fp = parse_flows(cfg, "config.flows", 20);
        std::vector<Mat> jets = {Mat::identity(n)};
        if (cfg.contains("jets")) {
            jets = parse_jets(cfg, n, substream(seed, 2), "config.jets", 0);
        }
        return [=]() {
            const FlowEnsemble ens = make_flow_ensemble(g, dom, fp.count, substream(seed, 1),
                                                        fp.tau_lo, fp.tau_hi, fp.steps_per_unit);
            return finish(test_character_nll(chi, dom, jets, ens, tol));
        };
    }
    if (cond == "conjugation_identity") {
        reject_unknown_keys(cfg, with_common({"group", "energy", "domain", "pairs"}), "config");
        const GroupSpec g = cfg.contains("group") ? parse_group(cfg["group"], n, "config.group")
                                                  : GroupSpec::full_diff(n);
        const EnergyDensity w = parse_energy(cfg, n, "config.energy");
        const BoxDomain dom = parse_domain(cfg, n, "config.domain", /*allow_resolution=*/false);
        const int pairs = int_or(cfg, "pairs", 10, "config");
        if (pairs < 1 || pairs > 1000) fail("config.pairs", "expected 1..1000");
        const Box box = dom.box();
        return [=]() {
            return finish(test_conjugation_identity(w, g, box, pairs, seed, tol));
        };
    }
    if (cond == "legh" || cond == "legh_identity") {
        reject_unknown_keys(cfg, with_common({"energy", "jet", "domain", "samples"}), "config");
        const EnergyDensity w = parse_energy(cfg, n, "config.energy");
        const Mat F = parse_jet(cfg, n, "config.jet");
        // Gram-paired integrands need a finer default grid than the plain
        // integral checks to keep identity-mode deviations under tolerance.
        const BoxDomain dom =
            parse_domain(cfg, n, "config.domain", /*allow_resolution=*/true,
                         /*default_cells=*/n == 3 ? 6 : 12);
        const int samples = int_or(cfg, "samples", 20, "config");
        if (samples < 1 || samples > 10000) fail("config.samples", "expected 1..10000");
        const LeghMode mode = cond == "legh" ? LeghMode::Inequality : LeghMode::Identity;
        return [=]() {
            return finish(test_legh(w, F, dom, samples, substream(seed, 3), mode, tol));
        };
    }
    if (cond == "lh_pointwise") {
        reject_unknown_keys(cfg, with_common({"energy", "jet", "pairs", "samples"}), "config");
        const EnergyDensity w = parse_energy(cfg, n, "config.energy");
        const Mat F = parse_jet(cfg, n, "config.jet");
        const std::string pairs =
            cfg.contains("pairs") ? str_at(cfg["pairs"], "config.pairs") : std::string("all");
        LhPairs lp = LhPairs::AllPairs;
        if (pairs == "orthogonal") lp = LhPairs::OrthogonalPairs;
        else if (pairs != "all") fail("config.pairs", "expected 'all' or 'orthogonal'");
        const int samples = int_or(cfg, "samples", 200, "config");
        if (samples < 1 || samples > 1000000) fail("config.samples", "expected 1..1000000");
        return [=]() {
            return finish(test_lh_pointwise(w, F, lp, samples, substream(seed, 3), tol));
        };
    }
    if (cond == "parhl") {
        reject_unknown_keys(cfg, with_common({"energy", "jet"}), "config");
        const EnergyDensity w = parse_energy(cfg, n, "config.energy");
        const Mat F = parse_jet(cfg, n, "config.jet");
        return [=]() { return finish(test_parhl(w, F, tol)); };
    }
    if (cond == "first_variation") {
        reject_unknown_keys(cfg, with_common({"energy", "map", "domain", "step"}), "config");
        const EnergyDensity w = parse_energy(cfg, n, "config.energy");
        const DeformationMap u = parse_map(cfg, n, "config.map");
        const BoxDomain dom = parse_domain(cfg, n, "config.domain");
        const double h = num_or(cfg, "step", 1e-4, "config");
        if (!(h > 0.0) || h > 0.1) fail("config.step", "expected a step in (0, 0.1]");
        return [=]() {
            SplitMix64 rng(substream(seed, 4));
            const VectorField eta =
                sample_admissible_field(GroupSpec::full_diff(n), dom.box(), rng);
            return finish(test_first_variation(w, u, eta, dom, h, tol));
        };
    }
    if (cond == "equilibrium_residual") {
        reject_unknown_keys(cfg, with_common({"energy", "map", "domain"}), "config");
        const EnergyDensity w = parse_energy(cfg, n, "config.energy");
        const DeformationMap u = parse_map(cfg, n, "config.map");
        const BoxDomain dom = parse_domain(cfg, n, "config.domain");
        return [=]() { return finish(test_equilibrium_residual(w, u, dom, tol)); };
    }
    if (cond == "exp_invariance") {
        reject_unknown_keys(cfg, with_common({"group", "domain", "tangents", "flows"}),
                            "config");
        if (!cfg.contains("group")) fail("config.group", "required");
        const GroupSpec g = parse_group(cfg["group"], n, "config.group");
        const BoxDomain dom = parse_domain(cfg, n, "config.domain");
        const int tangents = int_or(cfg, "tangents", 20, "config");
        if (tangents < 0 || tangents > 10000) fail("config.tangents", "expected 0..10000");
        const FlowParams fp = parse_flows(cfg, "config.flows", 5);
        return [=]() {
            return finish(test_exp_invariance(g, dom, tangents, fp.count, seed, tol));
        };
    }
    if (cond == "theta_convexity") {
        reject_unknown_keys(cfg, with_common({"theta"}), "config");
        if (n != 1) fail("config.n", "theta_convexity is a 1D condition");
        json t = cfg.contains("theta") ? cfg["theta"] : json::object();
        if (!t.is_object()) fail("config.theta", "expected an object");
        reject_unknown_keys(t, {"k", "lambda", "length", "pairs"}, "config.theta");
        const double k = num_or(t, "k", 1.0, "config.theta");
        const double lambda = num_or(t, "lambda", 0.0, "config.theta");
        const double length = num_or(t, "length", 1.0, "config.theta");
        const int pairs = int_or(t, "pairs", 20, "config.theta");
        if (!(k >= 0.0)) fail("config.theta.k", "must be >= 0");
        if (!(length > 0.0)) fail("config.theta.length", "must be positive");
        if (pairs < 1 || pairs > 10000) fail("config.theta.pairs", "expected 1..10000");
        return [=]() {
            return finish(test_theta_convexity(k, lambda, length, pairs, seed, tol));
        };
    }
    if (cond == "polyconvex_jensen") {
        reject_unknown_keys(cfg, with_common({"energy", "jet", "domain", "samples"}), "config");
        if (!cfg.contains("energy")) fail("config.energy", "required");
        const json& ej = cfg["energy"];
        if (!ej.is_object() || str_at(ej.contains("name") ? ej["name"] : json(),
                                      "config.energy.name") != "polyconvex")
            fail("config.energy.name", "this condition needs the 'polyconvex' density");
        const json p = ej.contains("params") ? ej["params"] : json::object();
        OuterConvex outer;
        std::vector<EnergyDensity> terms;
        try {
            // Reuse the catalog's own parser, then rebuild the pieces it used.
            (void)catalog_get("polyconvex", p, n);
            if (p.contains("outer")) {
                const std::string k = p["outer"].value("kind", std::string("square"));
                outer.kind = k == "linear" ? OuterKind::Linear
                                           : (k == "exp" ? OuterKind::Exp : OuterKind::Square);
                if (p["outer"].contains("coeffs"))
                    for (const auto& c : p["outer"]["coeffs"])
                        outer.coeffs.push_back(c.get<double>());
            }
            for (const auto& tj : p["terms"])
                terms.push_back(catalog_get(tj.value("name", std::string()),
                                            tj.contains("params") ? tj["params"] : json(), n));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            fail("config.energy.params", e.what());
        }
        const Mat F = parse_jet(cfg, n, "config.jet");
        const BoxDomain dom = parse_domain(cfg, n, "config.domain");
        const int samples = int_or(cfg, "samples", 50, "config");
        if (samples < 1 || samples > 100000) fail("config.samples", "expected 1..100000");
        return [=]() {
            return finish(test_polyconvex_jensen(outer, terms, F, dom, samples,
                                                 substream(seed, 3), tol));
        };
    }
    fail("config.condition", "unknown condition '" + cond + "'");
}

TestReport run_check(const json& config, std::optional<std::uint64_t> seed_override) {
    return compile_check(config, seed_override)();
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

namespace {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

Verdict verdict_from_string(const std::string& s, const std::string& path) {
    if (s == "pass") return Verdict::Pass;
    if (s == "fail") return Verdict::Fail;
    if (s == "inconclusive") return Verdict::Inconclusive;
    fail(path, "expected 'pass', 'fail' or 'inconclusive'");
}

void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + p.string() + " for writing");
    os << content;
    if (!os) throw std::runtime_error("short write to " + p.string());
}

} // namespace

SuiteResult run_suite(const json& suite, const std::string& out_dir,
                      std::optional<std::uint64_t> seed_override) {
    if (!suite.is_object()) fail("suite", "expected an object");
    reject_unknown_keys(suite, {"name", "entries"}, "suite");
    SuiteResult result;
    result.name = suite.contains("name") ? str_at(suite["name"], "suite.name")
                                         : std::string("suite");
    if (!suite.contains("entries") || !suite["entries"].is_array() || suite["entries"].empty())
        fail("suite.entries", "expected a non-empty array");

    struct Compiled {
        std::string id;
        std::string condition;
        Verdict expected;
        std::string digest;
        std::function<TestReport()> run;
    };
    std::vector<Compiled> compiled;
    std::set<std::string> seen_ids;
    const auto& entries = suite["entries"];
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const std::string path = "suite.entries[" + std::to_string(i) + "]";
        const json& e = entries[i];
        if (!e.is_object()) fail(path, "expected an object");
        reject_unknown_keys(e, {"id", "expect", "config"}, path);
        if (!e.contains("id")) fail(path + ".id", "required");
        const std::string id = str_at(e["id"], path + ".id");
        if (id.empty() || id.find_first_not_of("abcdefghijklmnopqrstuvwxyz"
                                               "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_.-") !=
                              std::string::npos)
            fail(path + ".id", "ids are filesystem names: [A-Za-z0-9_.-]+");
        if (!seen_ids.insert(id).second) fail(path + ".id", "duplicate id '" + id + "'");
        const Verdict expected =
            e.contains("expect") ? verdict_from_string(str_at(e["expect"], path + ".expect"),
                                                       path + ".expect")
                                 : Verdict::Pass;
        if (!e.contains("config")) fail(path + ".config", "required");
        Compiled c;
        c.id = id;
        c.expected = expected;
        c.digest = hex64(fnv1a64(e["config"].dump()));
        c.condition = e["config"].is_object() && e["config"].contains("condition") &&
                              e["config"]["condition"].is_string()
                          ? e["config"]["condition"].get<std::string>()
                          : std::string("unknown");
        try {
            c.run = compile_check(e["config"], seed_override);
        } catch (const ConfigError& ce) {
            fail(path + " (id '" + id + "')", ce.what());
        }
        compiled.push_back(std::move(c));
    }

    std::filesystem::create_directories(out_dir);
    const auto t0 = std::chrono::steady_clock::now();
    for (const Compiled& c : compiled) {
        TestReport rep;
        try {
            rep = c.run();
        } catch (const std::exception& ex) {
            rep.condition = c.condition;
            rep.verdict = Verdict::Inconclusive;
            rep.worst_margin = std::numeric_limits<double>::quiet_NaN();
            rep.caveat = std::string("runtime error: ") + ex.what();
        }
        write_file(std::filesystem::path(out_dir) / (c.id + ".report.json"),
                   report_to_json(rep).dump(2) + "\n");
        write_file(std::filesystem::path(out_dir) / (c.id + ".samples.csv"), report_csv(rep));
        SuiteEntryResult er;
        er.id = c.id;
        er.verdict = rep.verdict;
        er.expected = c.expected;
        er.matched = rep.verdict == c.expected;
        er.worst_margin = rep.worst_margin;
        er.config_digest = c.digest;
        er.caveat = rep.caveat;
        if (er.matched)
            ++result.matched;
        else {
            ++result.mismatched;
            if (er.verdict == Verdict::Inconclusive) ++result.inconclusive_mismatches;
        }
        result.entries.push_back(std::move(er));
    }
    result.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_file(std::filesystem::path(out_dir) / "suite_summary.json",
               suite_result_to_json(result).dump(2) + "\n");
    return result;
}

nlohmann::json suite_result_to_json(const SuiteResult& r) {
    json j;
    j["name"] = r.name;
    j["version"] = VARINV_VERSION;
    j["matched"] = r.matched;
    j["mismatched"] = r.mismatched;
    j["duration_seconds"] = r.duration_seconds;
    json es = json::array();
    for (const auto& e : r.entries) {
        json ej;
        ej["id"] = e.id;
        ej["verdict"] = to_string(e.verdict);
        ej["expected"] = to_string(e.expected);
        ej["matched"] = e.matched;
        ej["margin"] = e.worst_margin;
        ej["config_digest"] = e.config_digest;
        ej["caveat"] = e.caveat;
        es.push_back(ej);
    }
    j["entries"] = es;
    return j;
}

std::string listing_text() {
    std::string out;
    out += "conditions:\n";
    const std::vector<std::pair<const char*, const char*>> conds = {
        {"quasiconvexity", "integral of W(F + grad eta) vs |E| W(F) over bump fields or flows"},
        {"lower_invariance_left", "integral of W(F J) vs |E| W(F) along group flows"},
        {"lower_invariance_right", "integral of W(J F) vs |E| W(F) along group flows"},
        {"null_lagrangian", "two-sided exactness of the flow-perturbed integral"},
        {"character_nll", "exactness of log-character densities along their group's flows"},
        {"conjugation_identity", "change-of-variables identity between phi and F^-1 phi F"},
        {"legh", "integrated second variation must be nonnegative"},
        {"legh_identity", "integrated second variation must vanish"},
        {"lh_pointwise", "rank-one Hessian form minimized over unit pairs"},
        {"parhl", "antisymmetry pattern of the Hessian pairing"},
        {"first_variation", "inner-composition derivative of the functional at a map"},
        {"equilibrium_residual", "L2 norm of the strong-form operator applied to a map"},
        {"exp_invariance", "exponentials and flows stay in the group's matrix set"},
        {"theta_convexity", "midpoint convexity of the 1D director functional"},
        {"polyconvex_jensen", "Jensen route for convex functions of exact integrands"},
    };
    for (const auto& [name, desc] : conds) {
        out += "  ";
        out += name;
        for (std::size_t i = std::string(name).size(); i < 24; ++i) out += ' ';
        out += desc;
        out += '\n';
    }
    out += "\ngroups:\n";
    const std::vector<std::pair<const char*, const char*>> groups = {
        {"full_diff", "orientation-preserving jets; generic bump fields"},
        {"volume_preserving", "det F = 1; divergence-free bump fields (n = 2, 3)"},
        {"symplectic_2d", "F w F^T = w; Hamiltonian bump fields (n = 2)"},
        {"shear", "I + s E_pq; 1D profile driving component p by coordinate q"},
        {"separable_1d", "positive 1D jets; interval bump fields"},
    };
    for (const auto& [name, desc] : groups) {
        out += "  ";
        out += name;
        for (std::size_t i = std::string(name).size(); i < 24; ++i) out += ' ';
        out += desc;
        out += '\n';
    }
    out += "\ndensities:\n";
    for (const CatalogInfo& c : catalog_list()) {
        out += "  ";
        out += c.name;
        for (std::size_t i = c.name.size(); i < 24; ++i) out += ' ';
        out += c.description;
        out += '\n';
    }
    return out;
}

} // namespace varinv
