#pragma once
#include "varinv/field.hpp"
#include "varinv/pointmap.hpp"

namespace varinv {

/// Homothety-plus-translation  f(x) = x1 + eps * (x - x0).  Conjugating a
/// map by f shrinks (or grows) its support without changing its gradients,
/// which is how far-apart copies of the same perturbation are produced.
struct AffineRescale {
    Vec x0, x1;
    double eps = 1.0;

    static AffineRescale identity(int n);
    static AffineRescale make(Vec x0, Vec x1, double eps);

    bool is_identity() const;
    Vec apply(const Vec& x) const;
    Vec invert(const Vec& y) const;
    Box apply(const Box& b) const;
};

/// Time-tau map of a vector field, integrated pointwise with classical RK4
/// at a fixed step count.  The Jacobian is integrated alongside the position
/// through the variational equation  d/dt (grad phi) = grad eta(phi) * grad phi,
/// not by differencing positions.  Points outside the field's support are
/// returned as exact fixed points (a zero field makes every RK4 stage
/// vanish, so this is the value the integrator would produce anyway).
class FlowMap : public PointMap {
public:
    FlowMap(VectorField field, double tau, int steps);

    int dim() const override { return field_.dim(); }
    MapEval eval(const Vec& x) const override;

    /// Same field, time reversed: the numerical inverse flow.
    FlowMap inverse() const;
    /// Flow conjugated by a homothety-translation: r . phi . r^-1.
    FlowMap conjugate(const AffineRescale& r) const;

    const VectorField& field() const { return field_; }
    double tau() const { return tau_; }
    int steps() const { return steps_; }
    const AffineRescale& rescale() const { return rescale_; }

private:
    VectorField field_;
    double tau_;
    int steps_;
    AffineRescale rescale_;
};

/// Default resolution: 1000 steps per unit time, at least one step.
int default_flow_steps(double tau, int steps_per_unit = 1000);

/// Worst jet deviation of the flow's gradients over the grid nodes --
/// the check that a numerically integrated flow actually stayed in its
/// group.
double flow_group_check(const FlowMap& flow, const GroupSpec& g, const BoxDomain& grid);

} // namespace varinv
