#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "varinv/flow.hpp"
#include "varinv/quadrature.hpp"
#include "varinv/rng.hpp"
#include "varinv/sampling.hpp"

using namespace varinv;

namespace {

// Closed-form matrix exponential in 2D.  B = A - mu I is trace-free, so
// B^2 = (mu^2 - det A) I and the series collapses to cosh/cos + sinh/sin.
Mat expm2(const Mat& a, double tau) {
    const double mu = 0.5 * trace(a);
    Mat b = a;
    b(0, 0) -= mu;
    b(1, 1) -= mu;
    const double disc = mu * mu - det(a);
    double c0, c1;   // expm(tau b) = c0 I + c1 b
    if (disc > 1e-24) {
        const double d = std::sqrt(disc);
        c0 = std::cosh(tau * d);
        c1 = std::sinh(tau * d) / d;
    } else if (disc < -1e-24) {
        const double d = std::sqrt(-disc);
        c0 = std::cos(tau * d);
        c1 = std::sin(tau * d) / d;
    } else {
        c0 = 1.0;
        c1 = tau;
    }
    Mat out = Mat::identity(2);
    out *= c0;
    b *= c1;
    out += b;
    out *= std::exp(tau * mu);
    return out;
}

double flow_error_vs_expm(const Mat& a, double tau, int steps) {
    const Box box = Box::unit_cube(2);
    const VectorField eta = VectorField::linear_test(box, a);
    const FlowMap phi(eta, tau, steps);
    const Mat exact = expm2(a, tau);
    double worst = 0.0;
    SplitMix64 rng(5);
    for (int rep = 0; rep < 5; ++rep) {
        Vec x{rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
        const MapEval e = phi.eval(x);
        worst = std::max(worst, max_abs(e.y - exact * x));
        worst = std::max(worst, max_abs(e.grad - exact));
    }
    return worst;
}

} // namespace

TEST_CASE("bump profile closed forms") {
    const BumpProfile b(Vec{0.5, 0.5}, 0.3, 2.0);
    CHECK(b.value(Vec{0.5, 0.5}) == 2.0);
    // half-radius point: s = 1/4, value = A (3/4)^10
    CHECK(b.value(Vec{0.65, 0.5}) == doctest::Approx(2.0 * std::pow(0.75, 10)).epsilon(1e-14));
    CHECK(b.value(Vec{0.95, 0.5}) == 0.0);
    CHECK(b.in_support(Vec{0.6, 0.5}));
    CHECK_FALSE(b.in_support(Vec{0.81, 0.5}));
    CHECK(max_abs(b.grad(Vec{0.95, 0.5})) == 0.0);
    CHECK(max_abs(b.hess(Vec{0.95, 0.5})) == 0.0);

    // derivative checks at interior points
    SplitMix64 rng(11);
    const double h = 1e-6;
    for (int rep = 0; rep < 10; ++rep) {
        Vec x{0.5 + rng.uniform(-0.18, 0.18), 0.5 + rng.uniform(-0.18, 0.18)};
        const Vec g = b.grad(x);
        const Mat hess = b.hess(x);
        for (int j = 0; j < 2; ++j) {
            Vec xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            CHECK(g[j] == doctest::Approx((b.value(xp) - b.value(xm)) / (2 * h)).epsilon(1e-6));
            const Vec gp = b.grad(xp), gm = b.grad(xm);
            for (int i = 0; i < 2; ++i)
                CHECK(hess(i, j) ==
                      doctest::Approx((gp[i] - gm[i]) / (2 * h)).epsilon(1e-5).scale(1.0));
        }
        CHECK(max_abs(hess - transpose(hess)) < 1e-12);
    }
    CHECK_THROWS_AS(BumpProfile(Vec{0.0}, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("gauss-legendre exactness") {
    std::vector<double> x, w;
    gauss_legendre(6, x, w);
    REQUIRE(x.size() == 6);
    double sw = 0.0;
    for (double wi : w) sw += wi;
    CHECK(sw == doctest::Approx(2.0).epsilon(1e-14));
    for (int k = 0; k <= 11; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], k);
        const double exact = (k % 2 == 1) ? 0.0 : 2.0 / (k + 1);
        CHECK(s == doctest::Approx(exact).epsilon(1e-13).scale(1.0));
    }
}

TEST_CASE("box domain integrates polynomials exactly") {
    const BoxDomain dom(Box(Vec{0.0, -1.0}, Vec{1.0, 1.0}), 3, 4);
    CHECK(dom.volume() == doctest::Approx(2.0));
    CHECK(integrate(dom, [](const Vec&) { return 1.0; }) == doctest::Approx(2.0).epsilon(1e-14));
    // x^2 y^3 over [0,1] x [-1,1]: (1/3) * 0
    CHECK(integrate(dom, [](const Vec& p) { return p[0] * p[0] * p[1] * p[1] * p[1]; }) ==
          doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    // x^3 y^2: (1/4)(2/3)
    CHECK(integrate(dom, [](const Vec& p) { return p[0] * p[0] * p[0] * p[1] * p[1]; }) ==
          doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(dom.nodes().size() == dom.weights().size());
    CHECK(dom.nodes().size() == 144);   // (3*4)^2
}

TEST_CASE("integrate reports bad nodes") {
    const BoxDomain dom(Box::unit_cube(1), 2, 2);
    CHECK_THROWS_AS((void)integrate(dom, [](const Vec&) { return std::nan(""); }),
                    std::runtime_error);
}

TEST_CASE("surface rule") {
    const BoxDomain dom2(Box::unit_cube(2), 4, 4);
    auto s2 = surface_nodes(dom2);
    double per = 0.0, flux = 0.0;
    for (const auto& sn : s2) {
        per += sn.w;
        flux += sn.w * dot(sn.x, sn.normal);
        CHECK(norm2(sn.normal) == doctest::Approx(1.0));
    }
    CHECK(per == doctest::Approx(4.0).epsilon(1e-13));
    // divergence theorem for the identity field: div x = n
    CHECK(flux == doctest::Approx(2.0).epsilon(1e-13));

    const BoxDomain dom3(Box::unit_cube(3), 2, 3);
    auto s3 = surface_nodes(dom3);
    double area = 0.0, flux3 = 0.0;
    for (const auto& sn : s3) {
        area += sn.w;
        flux3 += sn.w * dot(sn.x, sn.normal);
    }
    CHECK(area == doctest::Approx(6.0).epsilon(1e-13));
    CHECK(flux3 == doctest::Approx(3.0).epsilon(1e-13));

    const BoxDomain dom1(Box::unit_cube(1), 1, 1);
    auto s1 = surface_nodes(dom1);
    REQUIRE(s1.size() == 2);
    CHECK(s1[0].w == 1.0);
    CHECK(s1[1].w == 1.0);
}

TEST_CASE("vector fields and their gradients") {
    const Box box = Box::unit_cube(2);
    SplitMix64 rng(17);
    const double h = 1e-6;

    auto fd_check = [&](const VectorField& f, const Vec& x) {
        const Mat g = f.gradient(x);
        for (int j = 0; j < f.dim(); ++j) {
            Vec xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            const Vec vp = f.value(xp), vm = f.value(xm);
            for (int i = 0; i < f.dim(); ++i)
                CHECK(g(i, j) == doctest::Approx((vp[i] - vm[i]) / (2 * h)).epsilon(2e-5).scale(1.0));
        }
    };

    const VectorField gb = VectorField::generic_bump(
        box, {{BumpProfile(Vec{0.4, 0.5}, 0.2, 0.3)}, {BumpProfile(Vec{0.6, 0.5}, 0.25, -0.2)}});
    CHECK(max_abs(gb.value(Vec{0.05, 0.05})) == 0.0);
    CHECK(max_abs(gb.gradient(Vec{0.05, 0.05})) == 0.0);
    CHECK_FALSE(gb.in_support(Vec{0.05, 0.05}));
    CHECK(gb.in_support(Vec{0.45, 0.5}));
    for (int rep = 0; rep < 5; ++rep)
        fd_check(gb, Vec{rng.uniform(0.3, 0.7), rng.uniform(0.4, 0.6)});

    const VectorField df = VectorField::div_free_2d(box, BumpProfile(Vec{0.5, 0.5}, 0.3, 0.1));
    for (int rep = 0; rep < 10; ++rep) {
        Vec x{rng.uniform(0.25, 0.75), rng.uniform(0.25, 0.75)};
        CHECK(trace(df.gradient(x)) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
        fd_check(df, x);
    }

    const Box box3 = Box::unit_cube(3);
    const VectorField df3 = VectorField::div_free_3d(
        box3, {BumpProfile(Vec{0.5, 0.5, 0.5}, 0.3, 0.05),
               BumpProfile(Vec{0.45, 0.55, 0.5}, 0.28, -0.04),
               BumpProfile(Vec{0.55, 0.5, 0.45}, 0.32, 0.03)});
    for (int rep = 0; rep < 10; ++rep) {
        Vec x{rng.uniform(0.3, 0.7), rng.uniform(0.3, 0.7), rng.uniform(0.3, 0.7)};
        CHECK(trace(df3.gradient(x)) == doctest::Approx(0.0).scale(1.0).epsilon(1e-11));
        fd_check(df3, x);
    }

    const VectorField sh =
        VectorField::shear(box, 0, 1, BumpProfile(Vec{0.5}, 0.25, 0.2));
    Vec p{0.1, 0.5};   // any x_0: displacement rides on x_1 only
    CHECK(sh.value(p)[1] == 0.0);
    CHECK(sh.value(p)[0] == doctest::Approx(BumpProfile(Vec{0.5}, 0.25, 0.2).value(Vec{0.5})));
    const Mat sg = sh.gradient(Vec{0.3, 0.55});
    CHECK(sg(1, 0) == 0.0);
    CHECK(sg(1, 1) == 0.0);
    CHECK(sg(0, 0) == 0.0);
    fd_check(sh, Vec{0.3, 0.55});

    CHECK_THROWS_AS((void)VectorField::generic_bump(
                        box, {{BumpProfile(Vec{0.9, 0.5}, 0.3, 0.1)}, {}}),
                    std::invalid_argument);
}

TEST_CASE("tangency check") {
    const Box box = Box::unit_cube(2);
    const BoxDomain grid(box, 6, 3);
    const VectorField df = VectorField::div_free_2d(box, BumpProfile(Vec{0.5, 0.5}, 0.3, 0.1));
    CHECK(field_in_tangent_group(df, GroupSpec::volume_preserving(2), grid).ok);
    CHECK(field_in_tangent_group(df, GroupSpec::full_diff(2), grid).ok);

    const VectorField ham = VectorField::hamiltonian_2d(box, BumpProfile(Vec{0.5, 0.5}, 0.3, 0.1));
    CHECK(field_in_tangent_group(ham, GroupSpec::symplectic_2d(), grid).ok);

    const VectorField gb = VectorField::generic_bump(
        box, {{BumpProfile(Vec{0.5, 0.5}, 0.3, 0.2)}, {}});
    const TangencyCheck bad = field_in_tangent_group(gb, GroupSpec::volume_preserving(2), grid);
    CHECK_FALSE(bad.ok);
    CHECK(bad.worst > 1e-4);

    const VectorField sh = VectorField::shear(box, 1, 0, BumpProfile(Vec{0.5}, 0.25, 0.2));
    CHECK(field_in_tangent_group(sh, GroupSpec::shear(2, 1, 0), grid).ok);
    CHECK_FALSE(field_in_tangent_group(sh, GroupSpec::shear(2, 0, 1), grid).ok);
}

TEST_CASE("flow matches the matrix exponential") {
    // one spiral (complex eigenvalues), one saddle-ish real case
    const Mat spiral{{0.2, -1.1}, {1.1, 0.2}};
    const Mat real{{0.5, 0.3}, {0.1, -0.4}};
    for (const Mat& a : {spiral, real}) {
        CHECK(flow_error_vs_expm(a, 0.37, 370) < 1e-10);
        CHECK(flow_error_vs_expm(a, -0.25, 250) < 1e-10);
    }
}

TEST_CASE("rk4 step-halving ratio") {
    const Mat a{{0.3, -0.9}, {0.8, -0.1}};
    const double e8 = flow_error_vs_expm(a, 0.8, 8);
    const double e16 = flow_error_vs_expm(a, 0.8, 16);
    const double ratio = e8 / e16;
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("flow round trip and group drift") {
    const Box box = Box::unit_cube(2);
    const BoxDomain grid(box, 5, 3);
    SplitMix64 rng(23);
    const VectorField eta = sample_admissible_field(GroupSpec::volume_preserving(2), box, rng);
    const FlowMap phi(eta, 0.3, default_flow_steps(0.3));
    const FlowMap inv = phi.inverse();
    double worst = 0.0;
    for (const Vec& x : grid.nodes()) {
        const MapEval fwd = phi.eval(x);
        const MapEval back = inv.eval(fwd.y);
        worst = std::max(worst, max_abs(back.y - x));
        // variational Jacobians invert each other along the trajectory
        worst = std::max(worst, max_abs(back.grad * fwd.grad - Mat::identity(2)));
    }
    CHECK(worst < 1e-9);
    CHECK(flow_group_check(phi, GroupSpec::volume_preserving(2), grid) < 1e-8);

    // points outside the support are exact fixed points
    const MapEval fixed = phi.eval(Vec{0.01, 0.01});
    CHECK(max_abs(fixed.y - Vec{0.01, 0.01}) == 0.0);
    CHECK(max_abs(fixed.grad - Mat::identity(2)) == 0.0);
}

TEST_CASE("variational jacobian matches position differencing") {
    const Box box = Box::unit_cube(2);
    SplitMix64 rng(29);
    const VectorField eta = sample_admissible_field(GroupSpec::full_diff(2), box, rng);
    const FlowMap phi(eta, 0.25, default_flow_steps(0.25));
    const double h = 1e-5;
    for (const Vec& x : {Vec{0.5, 0.5}, Vec{0.42, 0.61}, Vec{0.58, 0.47}}) {
        const Mat g = phi.eval(x).grad;
        for (int j = 0; j < 2; ++j) {
            Vec xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            const Vec col = (1.0 / (2 * h)) * (phi.eval(xp).y - phi.eval(xm).y);
            for (int i = 0; i < 2; ++i)
                CHECK(g(i, j) == doctest::Approx(col[i]).epsilon(1e-6).scale(1.0));
        }
    }
}

TEST_CASE("affine rescale and conjugated flows") {
    const AffineRescale id = AffineRescale::identity(2);
    CHECK(id.is_identity());
    const AffineRescale r = AffineRescale::make(Vec{0.5, 0.5}, Vec{0.3, 0.6}, 0.25);
    CHECK_FALSE(r.is_identity());
    const Vec x{0.7, 0.2};
    CHECK(max_abs(r.invert(r.apply(x)) - x) < 1e-14);
    const Box b = r.apply(Box::unit_cube(2));
    CHECK(b.extent(0) == doctest::Approx(0.25));

    SplitMix64 rng(31);
    const Box box = Box::unit_cube(2);
    const VectorField eta = sample_admissible_field(GroupSpec::full_diff(2), box, rng);
    const FlowMap phi(eta, 0.2, default_flow_steps(0.2));
    const FlowMap small = phi.conjugate(r);
    for (const Vec& p : {Vec{0.5, 0.5}, Vec{0.35, 0.62}}) {
        const MapEval direct = phi.eval(p);
        const MapEval conj = small.eval(r.apply(p));
        CHECK(max_abs(conj.y - r.apply(direct.y)) < 1e-12);
        CHECK(max_abs(conj.grad - direct.grad) < 1e-12);
    }
    CHECK_THROWS_AS((void)small.conjugate(r), std::invalid_argument);
}

TEST_CASE("default flow steps") {
    CHECK(default_flow_steps(0.3) == 300);
    CHECK(default_flow_steps(-0.3) == 300);
    CHECK(default_flow_steps(0.0) == 1);
    CHECK(default_flow_steps(1e-4) == 1);
    CHECK(default_flow_steps(0.5, 600) == 300);
}

TEST_CASE("tabulate matches pointwise evaluation") {
    const Box box = Box::unit_cube(2);
    const BoxDomain dom(box, 3, 3);
    SplitMix64 rng(37);
    const VectorField eta = sample_admissible_field(GroupSpec::full_diff(2), box, rng);
    const FlowMap phi(eta, 0.15, default_flow_steps(0.15));
    const FlowTable t = tabulate(phi, dom);
    REQUIRE(t.y.size() == dom.nodes().size());
    REQUIRE(t.jac.size() == dom.nodes().size());
    for (std::size_t i = 0; i < t.y.size(); i += 7) {
        const MapEval e = phi.eval(dom.nodes()[i]);
        CHECK(max_abs(t.y[i] - e.y) == 0.0);
        CHECK(max_abs(t.jac[i] - e.grad) == 0.0);
    }
}
