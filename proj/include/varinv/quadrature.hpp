#pragma once
#include <functional>
#include <vector>

#include "varinv/mat.hpp"

namespace varinv {

/// Axis-aligned box. All integration domains in the toolkit are boxes; the
/// canonical one is the unit cube.
struct Box {
    Vec lo, hi;

    Box() = default;
    Box(Vec lo_, Vec hi_);
    static Box unit_cube(int n);

    int dim() const { return lo.dim(); }
    double volume() const;
    double extent(int axis) const { return hi[axis] - lo[axis]; }
    bool contains(const Vec& x, double slack = 0.0) const;
};

/// Composite tensor-product Gauss-Legendre rule over a box: `cells`
/// subdivisions per axis, a `order`-point rule per cell per axis.  Nodes and
/// weights are precomputed at construction in a fixed lexicographic order;
/// that order is the reduction order everywhere, so integrals do not depend
/// on how node evaluations are scheduled.
class BoxDomain {
public:
    BoxDomain(Box box, int cells, int order);

    const Box& box() const { return box_; }
    int dim() const { return box_.dim(); }
    int cells() const { return cells_; }
    int order() const { return order_; }
    double volume() const { return box_.volume(); }

    const std::vector<Vec>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }

private:
    Box box_;
    int cells_;
    int order_;
    std::vector<Vec> nodes_;
    std::vector<double> weights_;
};

/// Gauss-Legendre rule on [-1,1] (Newton iteration on the Legendre
/// recurrence; accurate to machine precision, deterministic).
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);

/// Integrates f over the domain.  Node evaluations run under the current
/// ExecMode into an indexed buffer; the sum is always taken in node-index
/// order, so serial and parallel runs agree bitwise.  A non-finite integrand
/// value, or an exception from f, is reported with the offending node (first
/// in index order).
double integrate(const BoxDomain& dom, const std::function<double(const Vec&)>& f);

struct SurfaceNode {
    Vec x;
    Vec normal;   // outward unit normal
    double w;
};

/// Tensor-product rule on each face of the box (2n faces).  For n = 1 these
/// are the two endpoints with weight 1.
std::vector<SurfaceNode> surface_nodes(const BoxDomain& dom);

} // namespace varinv
