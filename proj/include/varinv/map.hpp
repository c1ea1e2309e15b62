#pragma once
#include <memory>
#include <vector>

#include "varinv/bump.hpp"
#include "varinv/energy.hpp"
#include "varinv/pointmap.hpp"
#include "varinv/quadrature.hpp"

namespace varinv {

/// One compactly supported scalar bump added to a single component of a map.
struct ComponentBump {
    int component = 0;
    BumpProfile bump;
};

enum class MapKind { Affine, AffineBump, Quadratic };

/// Closed-form deformations u : R^n -> R^n with exact gradients and second
/// derivatives.  The affine part (b, F) is kept accessible because several
/// testers need it: compactly supported perturbations agree with it on the
/// domain boundary, so u(E) equals the affine image of E.
class DeformationMap : public PointMap {
public:
    static DeformationMap affine(Vec b, Mat F);
    static DeformationMap affine_bump(Vec b, Mat F, std::vector<ComponentBump> bumps);
    /// u_i = b_i + F_ij x_j + 1/2 Q_ijk x_j x_k, where Q is read as the
    /// second-derivative tensor of u: a cross entry given on one side only
    /// is mirrored onto the other, so Q_i00 = 2 adds x_0^2 to u_i and
    /// Q_i01 = 1 (alone) adds x_0 x_1.
    static DeformationMap quadratic(Vec b, Mat F, Rank3 q);

    int dim() const override { return F_.dim(); }
    MapEval eval(const Vec& x) const override;
    /// d2 u_i / dx_j dx_k at x.
    Rank3 second_derivative(const Vec& x) const;

    MapKind kind() const { return kind_; }
    const Vec& offset() const { return b_; }
    const Mat& linear() const { return F_; }
    const std::vector<ComponentBump>& bumps() const { return bumps_; }

private:
    MapKind kind_ = MapKind::Affine;
    Vec b_;
    Mat F_;
    std::vector<ComponentBump> bumps_;
    Rank3 q_;
};

/// outer(inner(x)) with the chain-rule gradient.
class CompositeMap : public PointMap {
public:
    CompositeMap(std::shared_ptr<const PointMap> outer, std::shared_ptr<const PointMap> inner);

    int dim() const override { return inner_->dim(); }
    MapEval eval(const Vec& x) const override;

    const PointMap& outer() const { return *outer_; }
    const PointMap& inner() const { return *inner_; }

private:
    std::shared_ptr<const PointMap> outer_;
    std::shared_ptr<const PointMap> inner_;
};

/// I(u) = integral over the domain of W(x, u(x), grad u(x)).
double functional_eval(const EnergyDensity& w, const PointMap& u, const BoxDomain& dom);

} // namespace varinv
