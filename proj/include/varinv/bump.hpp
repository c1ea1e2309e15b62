#pragma once
#include "varinv/mat.hpp"

namespace varinv {

/// Radial compactly supported bump, identically zero outside the open ball
/// |x - center| < radius:
///
///     b(x) = amplitude * (1 - s)^10,   s = |x - center|^2 / radius^2
///
/// C^9 on all of R^n and polynomial inside the support, so Gauss cells
/// integrate it (and moderate compositions of it) essentially to machine
/// precision; an exp(-1/(1-s)) style profile costs two to three orders of
/// magnitude in quadrature accuracy at every resolution, which is why it is
/// not used here.  Writing g(q) = q^10 with q = 1 - s:
///     g'(s)  = -10 q^9,   g''(s) = 90 q^8
/// and s has gradient 2(x-c)/R^2, Hessian (2/R^2) I.
struct BumpProfile {
    Vec center;
    double radius = 0.0;
    double amplitude = 0.0;

    BumpProfile() = default;
    BumpProfile(Vec center_, double radius_, double amplitude_);

    int dim() const { return center.dim(); }
    bool in_support(const Vec& x) const;

    double value(const Vec& x) const;
    Vec grad(const Vec& x) const;
    Mat hess(const Vec& x) const;
};

} // namespace varinv
