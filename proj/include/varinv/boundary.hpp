#pragma once
#include <cstdint>

#include "varinv/map.hpp"
#include "varinv/quadrature.hpp"

namespace varinv {

/// Volume integrals of grad u, adj(grad u), det(grad u) next to the surface
/// integrals they must equal when the integrand has divergence structure.
/// Wedge convention (n = 3):
///   surf_adj_ij = 1/2 eps_jpq eps_imn (surface integral of u_p du_q/dx_n n_m),
/// which reduces to  surface integral of adj(u x n)  for n = 2 and closes to
/// |domain| * adj(F) for affine maps.
struct BoundaryReport {
    Mat vol_grad, surf_grad;   // int grad u  vs  surface int u (x) n
    Mat vol_adj, surf_adj;     // int adj(grad u)  vs  the wedge form above
    double vol_det = 0.0;      // int det(grad u)
    double surf_det = 0.0;     // 1/n surface int u . cof(grad u) n
    double min_det = 0.0;      // smallest det(grad u) seen at a volume node

    double grad_residual() const { return max_abs(vol_grad - surf_grad); }
    double adj_residual() const { return max_abs(vol_adj - surf_adj); }
    double det_residual() const { return vol_det > surf_det ? vol_det - surf_det
                                                            : surf_det - vol_det; }
};

/// Evaluates all integrals in one pass over volume nodes plus one over
/// surface nodes.  With require_orientation (default) a node with
/// det(grad u) <= 0 is a hard error, so vol_det can be read as the volume of
/// the image of the domain.
BoundaryReport boundary_integrals(const PointMap& u, const BoxDomain& dom,
                                  bool require_orientation = true);

struct ImageVolume {
    double estimate = 0.0;
    std::size_t hits = 0;
    std::size_t samples = 0;
};

/// Monte Carlo estimate of |u(domain box)| for maps that agree with their
/// affine part on the boundary.  Points are drawn uniformly in the affine
/// image (which equals u's image set when u is orientation preserving), and
/// membership is certified by Newton inversion of u, so the estimator's only
/// variance source is Newton failures.  det F <= 0 is a hard error.
ImageVolume image_volume_mc(const DeformationMap& u, const BoxDomain& dom,
                            std::size_t samples, std::uint64_t seed);

} // namespace varinv
