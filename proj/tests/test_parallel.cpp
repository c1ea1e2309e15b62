#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>

#include "varinv/boundary.hpp"
#include "varinv/parallel.hpp"
#include "varinv/sampling.hpp"
#include "varinv/testers.hpp"

using namespace varinv;

namespace {

// Runs the same computation once per execution mode and hands both results
// back; with OpenMP off the two runs still exercise the mode switch.
template <typename F>
auto both_modes(F&& work) {
    const ExecMode saved = exec_mode();
    exec_mode() = ExecMode::Serial;
    auto serial = work();
    exec_mode() = ExecMode::Parallel;
    auto parallel = work();
    exec_mode() = saved;
    return std::pair(serial, parallel);
}

} // namespace

TEST_CASE("parallel_for covers every index exactly once") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
    // zero iterations is fine
    parallel_for(0, [&](std::size_t) { CHECK(false); });
}

TEST_CASE("integration is bitwise mode independent") {
    const BoxDomain dom(Box::unit_cube(2), 16, 6);
    const auto [s, p] = both_modes([&] {
        return integrate(dom, [](const Vec& x) {
            return std::sin(17.0 * x[0]) * std::exp(x[1]) + std::cos(29.0 * x[0] * x[1]);
        });
    });
    CHECK(s == p);   // exact equality, not approximate
}

TEST_CASE("flow tabulation is bitwise mode independent") {
    const Box box = Box::unit_cube(2);
    const BoxDomain dom(box, 6, 4);
    SplitMix64 rng(7);
    const VectorField eta = sample_admissible_field(GroupSpec::volume_preserving(2), box, rng);
    const FlowMap phi(eta, 0.25, default_flow_steps(0.25));
    const auto [s, p] = both_modes([&] { return tabulate(phi, dom); });
    REQUIRE(s.y.size() == p.y.size());
    for (std::size_t i = 0; i < s.y.size(); ++i) {
        CHECK(max_abs(s.y[i] - p.y[i]) == 0.0);
        CHECK(max_abs(s.jac[i] - p.jac[i]) == 0.0);
    }
    const EnergyDensity w = make_stvk(2, 1.0, 1.0);
    const Mat F{{1.1, 0.2}, {0.0, 0.9}};
    const auto [es, ep] =
        both_modes([&] { return flow_energy(w, F, tabulate(phi, dom), dom, Side::Left); });
    CHECK(es == ep);
}

TEST_CASE("monte carlo image volume is bitwise mode independent") {
    const BoxDomain dom(Box::unit_cube(2), 4, 4);
    const DeformationMap u = DeformationMap::affine_bump(
        Vec::zero(2), Mat{{1.2, 0.1}, {-0.1, 0.9}},
        {{0, BumpProfile(Vec{0.5, 0.5}, 0.25, 0.05)}});
    const auto [s, p] = both_modes([&] { return image_volume_mc(u, dom, 20000, 5); });
    CHECK(s.estimate == p.estimate);
    CHECK(s.hits == p.hits);
}

TEST_CASE("gram assembly is bitwise mode independent") {
    const Box box = Box::unit_cube(2);
    const BoxDomain dom(box, 8, 4);
    SplitMix64 rng(11);
    const VectorField eta = sample_admissible_field(GroupSpec::full_diff(2), box, rng);
    const auto [s, p] = both_modes([&] { return gradient_gram(eta, dom); });
    REQUIRE(s.size() == p.size());
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(s[i] == p[i]);
}

TEST_CASE("node errors surface identically in both modes") {
    const BoxDomain dom(Box::unit_cube(1), 4, 3);
    auto bad = [&]() -> std::string {
        try {
            (void)integrate(dom, [](const Vec& x) {
                return x[0] > 0.4 ? std::nan("") : 1.0;
            });
        } catch (const std::exception& e) {
            return e.what();
        }
        return "";
    };
    const auto [s, p] = both_modes(bad);
    CHECK(s == p);
    CHECK(!s.empty());
}

TEST_CASE("whole testers replay bitwise across modes") {
    const BoxDomain dom(Box::unit_cube(2), 6, 4);
    const auto [s, p] = both_modes([&] {
        return test_quasiconvexity(make_neg_frobenius2(2), Mat::identity(2), dom, 6, 3, 1e-9);
    });
    CHECK(s.worst_margin == p.worst_margin);
    CHECK(report_to_json(s).dump() == report_to_json(p).dump());
    CHECK(report_csv(s) == report_csv(p));
}
