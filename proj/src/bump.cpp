#include "varinv/bump.hpp"

#include <cmath>
#include <stdexcept>

namespace varinv {

namespace {
// g(s) = (1-s)^10 on s < 1, hard zero beyond; derivatives in s.
inline double pow8(double t) {
    const double t2 = t * t;
    const double t4 = t2 * t2;
    return t4 * t4;
}
inline double g0(double t) { return pow8(t) * t * t; }
inline double g1(double t) { return -10.0 * pow8(t) * t; }
inline double g2(double t) { return 90.0 * pow8(t); }
} // namespace

BumpProfile::BumpProfile(Vec center_, double radius_, double amplitude_)
    : center(center_), radius(radius_), amplitude(amplitude_) {
    if (!(radius > 0.0)) throw std::invalid_argument("bump radius must be positive");
    if (!std::isfinite(amplitude)) throw std::invalid_argument("bump amplitude must be finite");
}

bool BumpProfile::in_support(const Vec& x) const {
    Vec d = x - center;
    return dot(d, d) < radius * radius;
}

double BumpProfile::value(const Vec& x) const {
    Vec d = x - center;
    const double s = dot(d, d) / (radius * radius);
    if (s >= 1.0) return 0.0;
    return amplitude * g0(1.0 - s);
}

Vec BumpProfile::grad(const Vec& x) const {
    Vec d = x - center;
    const double R2 = radius * radius;
    const double s = dot(d, d) / R2;
    if (s >= 1.0) return Vec::zero(dim());
    return (amplitude * g1(1.0 - s) * 2.0 / R2) * d;
}

Mat BumpProfile::hess(const Vec& x) const {
    Vec d = x - center;
    const double R2 = radius * radius;
    const double s = dot(d, d) / R2;
    if (s >= 1.0) return Mat::zero(dim());
    Mat h = Mat::zero(dim());
    const double c1 = amplitude * g2(1.0 - s) * 4.0 / (R2 * R2);
    const double c2 = amplitude * g1(1.0 - s) * 2.0 / R2;
    for (int i = 0; i < dim(); ++i) {
        for (int j = 0; j < dim(); ++j) h(i, j) = c1 * d[i] * d[j];
        h(i, i) += c2;
    }
    return h;
}

} // namespace varinv
