#include "varinv/map.hpp"

#include <stdexcept>
#include <utility>

namespace varinv {

DeformationMap DeformationMap::affine(Vec b, Mat F) {
    if (b.dim() != F.dim()) throw std::invalid_argument("deformation: offset/linear dim mismatch");
    DeformationMap m;
    m.kind_ = MapKind::Affine;
    m.b_ = std::move(b);
    m.F_ = std::move(F);
    return m;
}

DeformationMap DeformationMap::affine_bump(Vec b, Mat F, std::vector<ComponentBump> bumps) {
    DeformationMap m = affine(std::move(b), std::move(F));
    const int n = m.F_.dim();
    for (const auto& cb : bumps) {
        if (cb.component < 0 || cb.component >= n)
            throw std::invalid_argument("deformation: bump component out of range");
        if (cb.bump.dim() != n)
            throw std::invalid_argument("deformation: bump dimension mismatch");
    }
    m.kind_ = MapKind::AffineBump;
    m.bumps_ = std::move(bumps);
    return m;
}

DeformationMap DeformationMap::quadratic(Vec b, Mat F, Rank3 q) {
    DeformationMap m = affine(std::move(b), std::move(F));
    const int n = m.F_.dim();
    if (q.dim() != n) throw std::invalid_argument("deformation: quadratic term dim mismatch");
    // One-sided cross entries mirror by summation so the stored tensor is the
    // actual second derivative of the resulting polynomial.
    Rank3 sym(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            sym(i, j, j) = q(i, j, j);
            for (int k = j + 1; k < n; ++k) {
                const double m = q(i, j, k) + q(i, k, j);
                sym(i, j, k) = m;
                sym(i, k, j) = m;
            }
        }
    m.kind_ = MapKind::Quadratic;
    m.q_ = sym;
    return m;
}

MapEval DeformationMap::eval(const Vec& x) const {
    const int n = dim();
    if (x.dim() != n) throw std::invalid_argument("deformation: point dim mismatch");
    MapEval out;
    out.y = b_ + F_ * x;
    out.grad = F_;
    if (kind_ == MapKind::AffineBump) {
        for (const auto& cb : bumps_) {
            out.y[cb.component] += cb.bump.value(x);
            const Vec g = cb.bump.grad(x);
            for (int j = 0; j < n; ++j) out.grad(cb.component, j) += g[j];
        }
    } else if (kind_ == MapKind::Quadratic) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) out.y[i] += 0.5 * q_(i, j, k) * x[j] * x[k];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int k = 0; k < n; ++k) s += q_(i, j, k) * x[k];
                out.grad(i, j) += s;
            }
    }
    return out;
}

Rank3 DeformationMap::second_derivative(const Vec& x) const {
    const int n = dim();
    Rank3 r(n);
    if (kind_ == MapKind::Quadratic) return q_;
    if (kind_ == MapKind::AffineBump) {
        for (const auto& cb : bumps_) {
            const Mat h = cb.bump.hess(x);
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) r(cb.component, j, k) += h(j, k);
        }
    }
    return r;
}

CompositeMap::CompositeMap(std::shared_ptr<const PointMap> outer,
                           std::shared_ptr<const PointMap> inner)
    : outer_(std::move(outer)), inner_(std::move(inner)) {
    if (!outer_ || !inner_) throw std::invalid_argument("composite: null map");
    if (outer_->dim() != inner_->dim())
        throw std::invalid_argument("composite: dimension mismatch");
}

MapEval CompositeMap::eval(const Vec& x) const {
    const MapEval in = inner_->eval(x);
    MapEval out = outer_->eval(in.y);
    out.grad = out.grad * in.grad;
    return out;
}

double functional_eval(const EnergyDensity& w, const PointMap& u, const BoxDomain& dom) {
    if (w.dim() != u.dim() || dom.dim() != u.dim())
        throw std::invalid_argument("functional: dimension mismatch");
    return integrate(dom, [&](const Vec& x) {
        const MapEval e = u.eval(x);
        return w.value(x, e.y, e.grad);
    });
}

} // namespace varinv
