#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "varinv/eig.hpp"
#include "varinv/group.hpp"
#include "varinv/mat.hpp"
#include "varinv/rng.hpp"

using namespace varinv;

namespace {

Mat random_mat(int n, SplitMix64& rng, double lo = -1.0, double hi = 1.0) {
    Mat a = Mat::zero(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(lo, hi);
    return a;
}

} // namespace

TEST_CASE("vec arithmetic") {
    Vec a{1.0, 2.0, 3.0};
    Vec b{0.5, -1.0, 2.0};
    CHECK(a.dim() == 3);
    CHECK(dot(a, b) == doctest::Approx(0.5 - 2.0 + 6.0));
    CHECK(norm2(a) == doctest::Approx(std::sqrt(14.0)));
    CHECK(max_abs(b) == doctest::Approx(2.0));
    Vec c = a + b;
    CHECK(c[0] == doctest::Approx(1.5));
    c -= b;
    CHECK(c[2] == doctest::Approx(3.0));
    c = 2.0 * a;
    CHECK(c[1] == doctest::Approx(4.0));
    CHECK(Vec::zero(2).dim() == 2);
    CHECK(norm2(Vec::zero(2)) == 0.0);
}

TEST_CASE("mat construction and arithmetic") {
    Mat m{{1.0, 2.0}, {3.0, 4.0}};
    CHECK(m.dim() == 2);
    CHECK(m(0, 1) == 2.0);
    CHECK(trace(m) == 5.0);
    CHECK(frob2(m) == doctest::Approx(30.0));
    CHECK(max_abs(m) == 4.0);
    Mat t = transpose(m);
    CHECK(t(0, 1) == 3.0);
    Mat id = Mat::identity(3);
    CHECK(det(id) == doctest::Approx(1.0));
    Mat d = Mat::diag(Vec{2.0, 3.0});
    CHECK(d(0, 0) == 2.0);
    CHECK(d(0, 1) == 0.0);
    Vec x{1.0, 1.0};
    Vec y = m * x;
    CHECK(y[0] == doctest::Approx(3.0));
    CHECK(y[1] == doctest::Approx(7.0));
}

TEST_CASE("mat product") {
    Mat a{{1.0, 2.0}, {3.0, 4.0}};
    Mat b{{0.0, 1.0}, {1.0, 0.0}};
    Mat c = a * b;
    CHECK(c(0, 0) == 2.0);
    CHECK(c(0, 1) == 1.0);
    CHECK(c(1, 0) == 4.0);
    CHECK(c(1, 1) == 3.0);
}

TEST_CASE("entry validation rejects non-finite") {
    const double bad[4] = {1.0, std::nan(""), 0.0, 1.0};
    CHECK_THROWS_AS((void)Mat::from_entries(2, bad), std::invalid_argument);
}

TEST_CASE("determinant and adjugate identities") {
    SplitMix64 rng(42);
    for (int n = 2; n <= 3; ++n) {
        for (int rep = 0; rep < 20; ++rep) {
            Mat a = random_mat(n, rng);
            const double d = det(a);
            Mat adj = adjugate(a);
            Mat prod = adj * a;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    CHECK(prod(i, j) == doctest::Approx(i == j ? d : 0.0).epsilon(1e-12).scale(1.0 + std::fabs(d)));
            // cofactor is the gradient of det
            Mat cof = cofactor(a);
            const double h = 1e-6;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    Mat ap = a, am = a;
                    ap(i, j) += h;
                    am(i, j) -= h;
                    const double fd = (det(ap) - det(am)) / (2.0 * h);
                    CHECK(cof(i, j) == doctest::Approx(fd).epsilon(1e-8));
                }
            CHECK(max_abs(cof - transpose(adj)) < 1e-14);
        }
        // det is multiplicative
        Mat a = random_mat(n, rng), b = random_mat(n, rng);
        CHECK(det(a * b) == doctest::Approx(det(a) * det(b)).epsilon(1e-12));
    }
}

TEST_CASE("dimension one closed forms") {
    Mat a = Mat::zero(1);
    a(0, 0) = -2.5;
    CHECK(det(a) == -2.5);
    CHECK(cofactor(a)(0, 0) == 1.0);
    CHECK_THROWS_AS((void)adjugate(a), std::invalid_argument);
    CHECK(inverse(a)(0, 0) == doctest::Approx(-0.4));
}

TEST_CASE("inverse") {
    SplitMix64 rng(7);
    for (int n = 1; n <= 3; ++n) {
        Mat a = Mat::identity(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) += 0.3 * rng.uniform(-1.0, 1.0);
        Mat inv = inverse(a);
        CHECK(max_abs(inv * a - Mat::identity(n)) < 1e-13);
        CHECK(max_abs(a * inv - Mat::identity(n)) < 1e-13);
    }
    CHECK_THROWS_AS((void)inverse(Mat::zero(2)), std::domain_error);
}

TEST_CASE("jacobi eigenvalues") {
    const std::vector<double> two = symmetric_eigenvalues({2.0, 1.0, 1.0, 2.0}, 2);
    REQUIRE(two.size() == 2);
    CHECK(two[0] == doctest::Approx(1.0));
    CHECK(two[1] == doctest::Approx(3.0));
    // 3x3 with known spectrum: diag(5, -1, 2) conjugated by a rotation
    const double c = std::cos(0.7), s = std::sin(0.7);
    std::vector<double> r = {c, -s, 0, s, c, 0, 0, 0, 1};
    std::vector<double> d = {5, 0, 0, 0, -1, 0, 0, 0, 2};
    std::vector<double> m(9, 0.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double acc = 0.0;
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l)
                    acc += r[static_cast<std::size_t>(i * 3 + k)] * d[static_cast<std::size_t>(k * 3 + l)] *
                           r[static_cast<std::size_t>(j * 3 + l)];
            m[static_cast<std::size_t>(i * 3 + j)] = acc;
        }
    auto ev = symmetric_eigenvalues(m, 3);
    CHECK(ev[0] == doctest::Approx(-1.0));
    CHECK(ev[1] == doctest::Approx(2.0));
    CHECK(ev[2] == doctest::Approx(5.0));

    // Gram matrices are PSD
    SplitMix64 rng(3);
    for (int rep = 0; rep < 10; ++rep) {
        const int mdim = 4;
        std::vector<double> b(16);
        for (auto& v : b) v = rng.uniform(-1.0, 1.0);
        std::vector<double> g(16, 0.0);
        for (int i = 0; i < mdim; ++i)
            for (int j = 0; j < mdim; ++j)
                for (int k = 0; k < mdim; ++k)
                    g[static_cast<std::size_t>(i * mdim + j)] +=
                        b[static_cast<std::size_t>(k * mdim + i)] * b[static_cast<std::size_t>(k * mdim + j)];
        auto gev = symmetric_eigenvalues(g, mdim);
        CHECK(gev.front() >= -1e-12);
    }
    CHECK(symmetric_eigenvalues(std::vector<double>(4, 0.0), 2) == std::vector<double>{0.0, 0.0});
    CHECK_THROWS_AS((void)symmetric_eigenvalues({1.0, 2.0}, 2), std::invalid_argument);
    CHECK_THROWS_AS((void)symmetric_eigenvalues({}, 0), std::invalid_argument);
}

TEST_CASE("group membership") {
    const GroupSpec gl = GroupSpec::full_diff(2);
    CHECK(jet_member(gl, Mat::identity(2)).member);
    CHECK_FALSE(jet_member(gl, Mat{{-1.0, 0.0}, {0.0, 1.0}}).member);
    CHECK(jet_member(gl, Mat{{-1.0, 0.0}, {0.0, 1.0}}).deviation == doctest::Approx(1.0));

    const GroupSpec sl = GroupSpec::volume_preserving(2);
    CHECK(jet_member(sl, Mat{{2.0, 0.0}, {0.0, 0.5}}).member);
    JetCheck c = jet_member(sl, Mat{{2.0, 0.0}, {0.0, 1.0}});
    CHECK_FALSE(c.member);
    CHECK(c.deviation == doctest::Approx(1.0));

    const GroupSpec sp = GroupSpec::symplectic_2d();
    const double a = 0.9;
    CHECK(jet_member(sp, Mat{{std::cos(a), -std::sin(a)}, {std::sin(a), std::cos(a)}}).member);
    CHECK(jet_member(sp, Mat{{1.0, 3.0}, {0.0, 1.0}}).member);   // det 1 => symplectic in 2D
    CHECK_FALSE(jet_member(sp, Mat{{1.1, 0.0}, {0.0, 1.0}}).member);

    const GroupSpec sh = GroupSpec::shear(2, 0, 1);
    CHECK(jet_member(sh, Mat{{1.0, -1.7}, {0.0, 1.0}}).member);
    CHECK_FALSE(jet_member(sh, Mat{{1.0, 0.0}, {0.4, 1.0}}).member);
    CHECK(jet_member(sh, Mat{{1.0, 0.0}, {0.4, 1.0}}).deviation == doctest::Approx(0.4));

    const GroupSpec s1 = GroupSpec::separable_1d();
    Mat pos = Mat::zero(1);
    pos(0, 0) = 2.0;
    CHECK(jet_member(s1, pos).member);
    pos(0, 0) = -0.5;
    CHECK_FALSE(jet_member(s1, pos).member);

    CHECK_THROWS_AS((void)jet_member(gl, Mat::identity(3)), std::invalid_argument);
}

TEST_CASE("random jets are well conditioned members") {
    for (const GroupSpec& g : {GroupSpec::full_diff(2), GroupSpec::full_diff(3),
                               GroupSpec::volume_preserving(2), GroupSpec::volume_preserving(3),
                               GroupSpec::symplectic_2d(), GroupSpec::shear(3, 2, 0),
                               GroupSpec::separable_1d()}) {
        for (std::uint64_t s = 1; s <= 40; ++s) {
            const Mat j = random_jet_element(g, s);
            const JetCheck c = jet_member(g, j);
            CHECK(c.member);
            CHECK(c.deviation <= 1e-12);
            const double d = det(j);
            CHECK(d > 1.0 / 8.0 - 1e-12);
            CHECK(d < 8.0 + 1e-12);
        }
        // deterministic in the seed
        CHECK(max_abs(random_jet_element(g, 5) - random_jet_element(g, 5)) == 0.0);
    }
}

TEST_CASE("shear characters are homomorphisms") {
    const CharacterSpec chi = CharacterSpec::shear_exp(2, 0.8, 0, 1);
    auto shear = [](double s) {
        return Mat{{1.0, s}, {0.0, 1.0}};
    };
    CHECK(character_eval(chi, shear(0.0)) == doctest::Approx(1.0));
    CHECK(character_eval(chi, shear(1.3)) == doctest::Approx(std::exp(0.8 * 1.3)));
    CHECK(character_log(chi, shear(-2.0)) == doctest::Approx(-1.6));
    // E_pq is nilpotent, so the product of two shears adds parameters
    const double s = 0.4, t = -1.1;
    CHECK(character_eval(chi, shear(s) * shear(t)) ==
          doctest::Approx(character_eval(chi, shear(s)) * character_eval(chi, shear(t))));
    CHECK_THROWS_AS((void)character_eval(chi, Mat{{1.0, 0.0}, {0.3, 1.0}}),
                    std::invalid_argument);
    CHECK(chi.group().kind == GroupKind::Shear);
    CHECK(chi.group().p == 0);
    CHECK(chi.group().q == 1);
}

TEST_CASE("diagonal power characters") {
    const CharacterSpec chi = CharacterSpec::diagonal_power(2, Vec{2.0, -1.0});
    auto dd = [](double a, double b) { return Mat::diag(Vec{a, b}); };
    CHECK(character_eval(chi, dd(3.0, 2.0)) == doctest::Approx(9.0 / 2.0));
    CHECK(character_log(chi, dd(3.0, 2.0)) ==
          doctest::Approx(2.0 * std::log(3.0) - std::log(2.0)));
    CHECK(character_eval(chi, dd(1.5, 0.7) * dd(2.0, 3.0)) ==
          doctest::Approx(character_eval(chi, dd(1.5, 0.7)) * character_eval(chi, dd(2.0, 3.0))));
    CHECK_THROWS_AS((void)character_eval(chi, Mat{{1.0, 0.2}, {0.0, 1.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)character_eval(chi, dd(-1.0, 1.0)), std::invalid_argument);
}

TEST_CASE("splitmix64 reference stream") {
    SplitMix64 g(0);
    CHECK(g.next() == UINT64_C(0xE220A8397B1DCDAF));
    CHECK(g.next() == UINT64_C(0x6E789E6AA1B965F4));
    CHECK(g.next() == UINT64_C(0x06C45D188009454F));

    SplitMix64 a(99), b(99);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());

    SplitMix64 u(123);
    for (int i = 0; i < 1000; ++i) {
        const double x = u.uniform();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
        const double y = u.uniform(-2.0, 5.0);
        CHECK(y >= -2.0);
        CHECK(y < 5.0);
        const std::int64_t k = u.uniform_int(3, 7);
        CHECK(k >= 3);
        CHECK(k <= 7);
    }
}

TEST_CASE("substreams decorrelate") {
    CHECK(substream(1, 0) != substream(1, 1));
    CHECK(substream(1, 0) != substream(2, 0));
    CHECK(substream(77, 5) == substream(77, 5));
}
