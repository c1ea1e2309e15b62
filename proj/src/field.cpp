#include "varinv/field.hpp"

#include <cmath>
#include <stdexcept>

namespace varinv {

namespace {

// Support must stay strictly inside the declared box along the given axis.
void require_inside(const Box& box, int axis, double center, double radius) {
    if (!(center - radius > box.lo[axis] && center + radius < box.hi[axis]))
        throw std::invalid_argument("field support touches the domain boundary");
}

void require_bump_inside(const Box& box, const BumpProfile& b) {
    if (b.dim() != box.dim())
        throw std::invalid_argument("bump dimension does not match the field domain");
    for (int a = 0; a < box.dim(); ++a) require_inside(box, a, b.center[a], b.radius);
}

nlohmann::json bump_json(const BumpProfile& b) {
    nlohmann::json j;
    auto c = nlohmann::json::array();
    for (int i = 0; i < b.dim(); ++i) c.push_back(b.center[i]);
    j["center"] = c;
    j["radius"] = b.radius;
    j["amplitude"] = b.amplitude;
    return j;
}

} // namespace

VectorField VectorField::generic_bump(const Box& domain,
                                      std::vector<std::vector<BumpProfile>> component_bumps) {
    if (static_cast<int>(component_bumps.size()) != domain.dim())
        throw std::invalid_argument("generic_bump: need one bump list per component");
    for (const auto& list : component_bumps)
        for (const auto& b : list) require_bump_inside(domain, b);
    VectorField f;
    f.kind_ = FieldKind::GenericBump;
    f.domain_ = domain;
    f.comp_ = std::move(component_bumps);
    return f;
}

VectorField VectorField::div_free_2d(const Box& domain, BumpProfile stream) {
    if (domain.dim() != 2) throw std::invalid_argument("div_free_2d: domain must be 2D");
    require_bump_inside(domain, stream);
    VectorField f;
    f.kind_ = FieldKind::DivFree2D;
    f.domain_ = domain;
    f.stream_ = stream;
    return f;
}

VectorField VectorField::hamiltonian_2d(const Box& domain, BumpProfile stream) {
    VectorField f = div_free_2d(domain, stream);
    f.kind_ = FieldKind::Hamiltonian2D;
    return f;
}

VectorField VectorField::div_free_3d(const Box& domain, std::array<BumpProfile, 3> potential) {
    if (domain.dim() != 3) throw std::invalid_argument("div_free_3d: domain must be 3D");
    for (const auto& b : potential) require_bump_inside(domain, b);
    VectorField f;
    f.kind_ = FieldKind::DivFree3D;
    f.domain_ = domain;
    f.pot_ = potential;
    return f;
}

VectorField VectorField::shear(const Box& domain, int p, int q, BumpProfile profile_1d) {
    const int n = domain.dim();
    GroupSpec::shear(n, p, q);  // validates indices, p != q
    if (profile_1d.dim() != 1)
        throw std::invalid_argument("shear: driving profile must be one-dimensional");
    require_inside(domain, q, profile_1d.center[0], profile_1d.radius);
    VectorField f;
    f.kind_ = FieldKind::Shear;
    f.domain_ = domain;
    f.stream_ = profile_1d;
    f.p_ = p;
    f.q_ = q;
    return f;
}

VectorField VectorField::separable_1d(const Box& domain, BumpProfile profile) {
    if (domain.dim() != 1) throw std::invalid_argument("separable_1d: domain must be 1D");
    require_bump_inside(domain, profile);
    VectorField f;
    f.kind_ = FieldKind::Separable1D;
    f.domain_ = domain;
    f.stream_ = profile;
    return f;
}

VectorField VectorField::linear_test(const Box& domain, Mat a) {
    if (a.dim() != domain.dim()) throw std::invalid_argument("linear_test: dimension mismatch");
    VectorField f;
    f.kind_ = FieldKind::LinearTest;
    f.domain_ = domain;
    f.a_ = a;
    return f;
}

bool VectorField::in_support(const Vec& x) const {
    switch (kind_) {
        case FieldKind::GenericBump:
            for (const auto& list : comp_)
                for (const auto& b : list)
                    if (b.in_support(x)) return true;
            return false;
        case FieldKind::DivFree2D:
        case FieldKind::Hamiltonian2D:
        case FieldKind::Separable1D:
            return stream_.in_support(x);
        case FieldKind::DivFree3D:
            for (const auto& b : pot_)
                if (b.in_support(x)) return true;
            return false;
        case FieldKind::Shear: {
            const double d = x[q_] - stream_.center[0];
            return std::fabs(d) < stream_.radius;
        }
        case FieldKind::LinearTest:
            return true;
    }
    return false;
}

Vec VectorField::value(const Vec& x) const {
    const int n = dim();
    switch (kind_) {
        case FieldKind::GenericBump: {
            Vec v(n);
            for (int i = 0; i < n; ++i)
                for (const auto& b : comp_[static_cast<std::size_t>(i)]) v[i] += b.value(x);
            return v;
        }
        case FieldKind::DivFree2D:
        case FieldKind::Hamiltonian2D: {
            // eta = (d psi / dx2, -d psi / dx1): divergence-free by symmetry
            // of the mixed partials (exactly, since both come from the same
            // stored Hessian entry).
            Vec g = stream_.grad(x);
            Vec v(2);
            v[0] = g[1];
            v[1] = -g[0];
            return v;
        }
        case FieldKind::DivFree3D: {
            // curl of the potential
            Vec v(3);
            Vec g0 = pot_[0].grad(x), g1 = pot_[1].grad(x), g2 = pot_[2].grad(x);
            v[0] = g2[1] - g1[2];
            v[1] = g0[2] - g2[0];
            v[2] = g1[0] - g0[1];
            return v;
        }
        case FieldKind::Shear: {
            Vec v(n);
            Vec t{x[q_]};
            v[p_] = stream_.value(t);
            return v;
        }
        case FieldKind::Separable1D: {
            Vec v(1);
            v[0] = stream_.value(x);
            return v;
        }
        case FieldKind::LinearTest:
            return a_ * x;
    }
    return Vec::zero(n);
}

Mat VectorField::gradient(const Vec& x) const {
    const int n = dim();
    switch (kind_) {
        case FieldKind::GenericBump: {
            Mat m = Mat::zero(n);
            for (int i = 0; i < n; ++i)
                for (const auto& b : comp_[static_cast<std::size_t>(i)]) {
                    Vec g = b.grad(x);
                    for (int j = 0; j < n; ++j) m(i, j) += g[j];
                }
            return m;
        }
        case FieldKind::DivFree2D:
        case FieldKind::Hamiltonian2D: {
            Mat h = stream_.hess(x);
            Mat m = Mat::zero(2);
            m(0, 0) = h(0, 1);
            m(0, 1) = h(1, 1);
            m(1, 0) = -h(0, 0);
            m(1, 1) = -h(0, 1);   // trace cancels m(0,0) exactly
            return m;
        }
        case FieldKind::DivFree3D: {
            Mat h0 = pot_[0].hess(x), h1 = pot_[1].hess(x), h2 = pot_[2].hess(x);
            Mat m = Mat::zero(3);
            for (int j = 0; j < 3; ++j) {
                m(0, j) = h2(1, j) - h1(2, j);
                m(1, j) = h0(2, j) - h2(0, j);
                m(2, j) = h1(0, j) - h0(1, j);
            }
            return m;
        }
        case FieldKind::Shear: {
            Mat m = Mat::zero(n);
            Vec t{x[q_]};
            m(p_, q_) = stream_.grad(t)[0];
            return m;
        }
        case FieldKind::Separable1D: {
            Mat m = Mat::zero(1);
            m(0, 0) = stream_.grad(x)[0];
            return m;
        }
        case FieldKind::LinearTest:
            return a_;
    }
    return Mat::zero(n);
}

nlohmann::json VectorField::params() const {
    nlohmann::json j;
    switch (kind_) {
        case FieldKind::GenericBump: {
            j["kind"] = "generic_bump";
            auto comps = nlohmann::json::array();
            for (const auto& list : comp_) {
                auto l = nlohmann::json::array();
                for (const auto& b : list) l.push_back(bump_json(b));
                comps.push_back(l);
            }
            j["components"] = comps;
            break;
        }
        case FieldKind::DivFree2D:
            j["kind"] = "div_free_2d";
            j["stream"] = bump_json(stream_);
            break;
        case FieldKind::Hamiltonian2D:
            j["kind"] = "hamiltonian_2d";
            j["stream"] = bump_json(stream_);
            break;
        case FieldKind::DivFree3D: {
            j["kind"] = "div_free_3d";
            auto l = nlohmann::json::array();
            for (const auto& b : pot_) l.push_back(bump_json(b));
            j["potential"] = l;
            break;
        }
        case FieldKind::Shear:
            j["kind"] = "shear";
            j["p"] = p_ + 1;
            j["q"] = q_ + 1;
            j["profile"] = bump_json(stream_);
            break;
        case FieldKind::Separable1D:
            j["kind"] = "separable_1d";
            j["profile"] = bump_json(stream_);
            break;
        case FieldKind::LinearTest: {
            j["kind"] = "linear_test";
            auto rows = nlohmann::json::array();
            for (int i = 0; i < a_.dim(); ++i) {
                auto r = nlohmann::json::array();
                for (int jj = 0; jj < a_.dim(); ++jj) r.push_back(a_(i, jj));
                rows.push_back(r);
            }
            j["matrix"] = rows;
            break;
        }
    }
    return j;
}

TangencyCheck field_in_tangent_group(const VectorField& f, const GroupSpec& g,
                                     const BoxDomain& grid) {
    if (f.dim() != g.n)
        throw std::invalid_argument("field_in_tangent_group: dimension mismatch");
    TangencyCheck r;
    r.witness = Vec::zero(f.dim());
    for (const Vec& x : grid.nodes()) {
        const Mat dg = f.gradient(x);
        double dev = 0.0;
        switch (g.kind) {
            case GroupKind::FullDiff:
            case GroupKind::Separable1D:
                dev = 0.0;
                break;
            case GroupKind::VolumePreserving:
                dev = std::fabs(trace(dg));
                break;
            case GroupKind::Symplectic2D: {
                // d/dt (F w F^T) = 0 at F = I  <=>  (grad eta) w + w (grad eta)^T = 0
                Mat w = Mat::zero(2);
                w(0, 1) = 1.0;
                w(1, 0) = -1.0;
                dev = max_abs(dg * w + w * transpose(dg));
                break;
            }
            case GroupKind::Shear: {
                for (int i = 0; i < g.n; ++i)
                    for (int j = 0; j < g.n; ++j) {
                        if (i == g.p && j == g.q) continue;
                        dev = std::max(dev, std::fabs(dg(i, j)));
                    }
                break;
            }
        }
        if (dev > r.worst) {
            r.worst = dev;
            r.witness = x;
        }
    }
    r.ok = r.worst <= g.tolerance;
    return r;
}

} // namespace varinv
