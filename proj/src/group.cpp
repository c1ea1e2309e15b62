#include "varinv/group.hpp"

#include <cmath>
#include <stdexcept>

#include "varinv/rng.hpp"

namespace varinv {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

Mat rotation2(double a) {
    Mat r = Mat::zero(2);
    r(0, 0) = std::cos(a);
    r(0, 1) = -std::sin(a);
    r(1, 0) = std::sin(a);
    r(1, 1) = std::cos(a);
    return r;
}

Mat axis_rotation3(int axis, double a) {
    Mat r = Mat::identity(3);
    const int i = (axis + 1) % 3, j = (axis + 2) % 3;
    r(i, i) = std::cos(a);
    r(i, j) = -std::sin(a);
    r(j, i) = std::sin(a);
    r(j, j) = std::cos(a);
    return r;
}

Mat random_rotation(int n, SplitMix64& rng) {
    if (n == 1) return Mat::identity(1);
    if (n == 2) return rotation2(rng.uniform(0.0, 6.283185307179586));
    return axis_rotation3(2, rng.uniform(0.0, 6.283185307179586)) *
           axis_rotation3(1, rng.uniform(0.0, 6.283185307179586)) *
           axis_rotation3(0, rng.uniform(0.0, 6.283185307179586));
}

// Standard symplectic form on R^2.
Mat omega2() {
    Mat w = Mat::zero(2);
    w(0, 1) = 1.0;
    w(1, 0) = -1.0;
    return w;
}

} // namespace

GroupSpec GroupSpec::full_diff(int n) {
    require(n >= 1 && n <= kMaxDim, "group dimension must be 1, 2 or 3");
    GroupSpec g;
    g.kind = GroupKind::FullDiff;
    g.n = n;
    return g;
}

GroupSpec GroupSpec::volume_preserving(int n) {
    require(n >= 2 && n <= kMaxDim, "volume-preserving group needs n in {2,3}");
    GroupSpec g;
    g.kind = GroupKind::VolumePreserving;
    g.n = n;
    return g;
}

GroupSpec GroupSpec::symplectic_2d() {
    GroupSpec g;
    g.kind = GroupKind::Symplectic2D;
    g.n = 2;
    return g;
}

GroupSpec GroupSpec::shear(int n, int p, int q) {
    require(n >= 2 && n <= kMaxDim, "shear group needs n in {2,3}");
    require(p >= 0 && p < n && q >= 0 && q < n, "shear indices out of range");
    require(p != q, "shear indices must satisfy p != q");
    GroupSpec g;
    g.kind = GroupKind::Shear;
    g.n = n;
    g.p = p;
    g.q = q;
    return g;
}

GroupSpec GroupSpec::separable_1d() {
    GroupSpec g;
    g.kind = GroupKind::Separable1D;
    g.n = 1;
    return g;
}

std::string GroupSpec::name() const {
    switch (kind) {
        case GroupKind::FullDiff: return "full_diff";
        case GroupKind::VolumePreserving: return "volume_preserving";
        case GroupKind::Symplectic2D: return "symplectic_2d";
        case GroupKind::Shear:
            return "shear(" + std::to_string(p + 1) + "," + std::to_string(q + 1) + ")";
        case GroupKind::Separable1D: return "separable_1d";
    }
    return "?";
}

JetCheck jet_member(const GroupSpec& g, const Mat& F) {
    require(F.dim() == g.n, "jet_member: dimension mismatch between group and matrix");
    JetCheck r;
    switch (g.kind) {
        case GroupKind::FullDiff:
        case GroupKind::Separable1D: {
            const double d = det(F);
            r.deviation = d > 0.0 ? 0.0 : -d;
            r.member = d > 0.0;
            return r;
        }
        case GroupKind::VolumePreserving: {
            r.deviation = std::fabs(det(F) - 1.0);
            r.member = r.deviation <= g.tolerance;
            return r;
        }
        case GroupKind::Symplectic2D: {
            const Mat w = omega2();
            r.deviation = max_abs(F * w * transpose(F) - w);
            r.member = r.deviation <= g.tolerance;
            return r;
        }
        case GroupKind::Shear: {
            double dev = 0.0;
            for (int i = 0; i < g.n; ++i)
                for (int j = 0; j < g.n; ++j) {
                    if (i == g.p && j == g.q) continue;
                    const double target = (i == j) ? 1.0 : 0.0;
                    dev = std::max(dev, std::fabs(F(i, j) - target));
                }
            r.deviation = dev;
            r.member = dev <= g.tolerance;
            return r;
        }
    }
    return r;
}

Mat random_jet_element(const GroupSpec& g, std::uint64_t seed) {
    SplitMix64 rng(seed);
    switch (g.kind) {
        case GroupKind::FullDiff: {
            if (g.n == 1) {
                Mat m = Mat::zero(1);
                m(0, 0) = rng.uniform(0.25, 4.0);
                return m;
            }
            Mat r1 = random_rotation(g.n, rng);
            Vec d(g.n);
            for (int i = 0; i < g.n; ++i) d[i] = rng.uniform(0.5, 2.0);
            Mat r2 = random_rotation(g.n, rng);
            return r1 * Mat::diag(d) * r2;
        }
        case GroupKind::VolumePreserving:
        case GroupKind::Symplectic2D: {
            // Unit-determinant diagonal keeps |det - 1| at roundoff scale.
            Mat r1 = random_rotation(g.n, rng);
            Vec d(g.n);
            if (g.n == 2) {
                d[0] = rng.uniform(0.5, 2.0);
                d[1] = 1.0 / d[0];
            } else {
                d[0] = rng.uniform(0.5, 2.0);
                d[1] = rng.uniform(0.5, 2.0);
                d[2] = 1.0 / (d[0] * d[1]);
            }
            Mat r2 = random_rotation(g.n, rng);
            return r1 * Mat::diag(d) * r2;
        }
        case GroupKind::Shear: {
            Mat m = Mat::identity(g.n);
            m(g.p, g.q) = rng.uniform(-2.0, 2.0);
            return m;
        }
        case GroupKind::Separable1D: {
            Mat m = Mat::zero(1);
            m(0, 0) = rng.uniform(0.25, 4.0);
            return m;
        }
    }
    throw std::logic_error("unreachable");
}

CharacterSpec CharacterSpec::shear_exp(int n, double c, int p, int q) {
    GroupSpec::shear(n, p, q);  // validates the indices
    if (!std::isfinite(c)) throw std::invalid_argument("shear_exp: non-finite coefficient");
    CharacterSpec s;
    s.kind = CharacterKind::ShearExp;
    s.n = n;
    s.c = c;
    s.p = p;
    s.q = q;
    return s;
}

CharacterSpec CharacterSpec::diagonal_power(int n, const Vec& powers) {
    require(powers.dim() == n, "diagonal_power: exponent count must match dimension");
    CharacterSpec s;
    s.kind = CharacterKind::DiagonalPower;
    s.n = n;
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(powers[i]))
            throw std::invalid_argument("diagonal_power: non-finite exponent");
        s.powers[static_cast<std::size_t>(i)] = powers[i];
    }
    return s;
}

GroupSpec CharacterSpec::group() const {
    if (kind == CharacterKind::ShearExp) return GroupSpec::shear(n, p, q);
    throw std::invalid_argument("diagonal_power characters have no sampled group");
}

std::string CharacterSpec::name() const {
    if (kind == CharacterKind::ShearExp)
        return "shear_exp(c=" + std::to_string(c) + "," + std::to_string(p + 1) + "," +
               std::to_string(q + 1) + ")";
    return "diagonal_power";
}

double character_log(const CharacterSpec& chi, const Mat& F) {
    require(F.dim() == chi.n, "character: dimension mismatch");
    if (chi.kind == CharacterKind::ShearExp) {
        const JetCheck jc = jet_member(chi.group(), F);
        if (!jc.member)
            throw std::invalid_argument("character: matrix is not in the shear family");
        return chi.c * F(chi.p, chi.q);
    }
    // DiagonalPower: positive diagonal matrices.
    double dev = 0.0;
    for (int i = 0; i < chi.n; ++i)
        for (int j = 0; j < chi.n; ++j)
            if (i != j) dev = std::max(dev, std::fabs(F(i, j)));
    if (dev > chi.tolerance)
        throw std::invalid_argument("character: matrix is not diagonal");
    double s = 0.0;
    for (int i = 0; i < chi.n; ++i) {
        if (F(i, i) <= 0.0)
            throw std::invalid_argument("character: diagonal entries must be positive");
        s += chi.powers[static_cast<std::size_t>(i)] * std::log(F(i, i));
    }
    return s;
}

double character_eval(const CharacterSpec& chi, const Mat& F) {
    return std::exp(character_log(chi, F));
}

} // namespace varinv
