#include "varinv/flow.hpp"

#include <cmath>
#include <stdexcept>

namespace varinv {

AffineRescale AffineRescale::identity(int n) {
    AffineRescale r;
    r.x0 = Vec::zero(n);
    r.x1 = Vec::zero(n);
    r.eps = 1.0;
    return r;
}

AffineRescale AffineRescale::make(Vec x0, Vec x1, double eps) {
    if (x0.dim() != x1.dim()) throw std::invalid_argument("rescale: dimension mismatch");
    if (!(eps > 0.0)) throw std::invalid_argument("rescale: eps must be positive");
    AffineRescale r;
    r.x0 = x0;
    r.x1 = x1;
    r.eps = eps;
    return r;
}

bool AffineRescale::is_identity() const {
    return eps == 1.0 && max_abs(x0) == 0.0 && max_abs(x1) == 0.0;
}

Vec AffineRescale::apply(const Vec& x) const { return x1 + eps * (x - x0); }

Vec AffineRescale::invert(const Vec& y) const { return x0 + (1.0 / eps) * (y - x1); }

Box AffineRescale::apply(const Box& b) const { return Box(apply(b.lo), apply(b.hi)); }

FlowMap::FlowMap(VectorField field, double tau, int steps)
    : field_(std::move(field)), tau_(tau), steps_(steps),
      rescale_(AffineRescale::identity(field_.dim())) {
    if (steps < 1) throw std::invalid_argument("flow: needs at least one step");
    if (!std::isfinite(tau)) throw std::invalid_argument("flow: non-finite time");
}

int default_flow_steps(double tau, int steps_per_unit) {
    const int s = static_cast<int>(std::ceil(std::fabs(tau) * steps_per_unit));
    return s < 1 ? 1 : s;
}

MapEval FlowMap::eval(const Vec& x_in) const {
    const int n = dim();
    const bool conj = !rescale_.is_identity();
    Vec x = conj ? rescale_.invert(x_in) : x_in;

    MapEval out;
    if (!field_.in_support(x)) {
        // Trajectories starting outside the support never move.
        out.y = conj ? rescale_.apply(x) : x;
        out.grad = Mat::identity(n);
        return out;
    }

    Mat J = Mat::identity(n);
    const double h = tau_ / steps_;
    for (int s = 0; s < steps_; ++s) {
        // Combined RK4 step for position and Jacobian.
        const Vec k1 = field_.value(x);
        const Mat K1 = field_.gradient(x) * J;

        const Vec x2 = x + (0.5 * h) * k1;
        const Vec k2 = field_.value(x2);
        const Mat K2 = field_.gradient(x2) * (J + (0.5 * h) * K1);

        const Vec x3 = x + (0.5 * h) * k2;
        const Vec k3 = field_.value(x3);
        const Mat K3 = field_.gradient(x3) * (J + (0.5 * h) * K2);

        const Vec x4 = x + h * k3;
        const Vec k4 = field_.value(x4);
        const Mat K4 = field_.gradient(x4) * (J + h * K3);

        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        J += (h / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4);
    }
    out.y = conj ? rescale_.apply(x) : x;
    out.grad = J;   // homothety conjugation leaves gradients unchanged
    return out;
}

FlowMap FlowMap::inverse() const {
    FlowMap r(field_, -tau_, steps_);
    r.rescale_ = rescale_;
    return r;
}

FlowMap FlowMap::conjugate(const AffineRescale& r) const {
    if (!rescale_.is_identity())
        throw std::invalid_argument("flow: already conjugated");
    if (r.x0.dim() != dim()) throw std::invalid_argument("flow: rescale dimension mismatch");
    FlowMap out(field_, tau_, steps_);
    out.rescale_ = r;
    return out;
}

double flow_group_check(const FlowMap& flow, const GroupSpec& g, const BoxDomain& grid) {
    if (flow.dim() != g.n)
        throw std::invalid_argument("flow_group_check: dimension mismatch");
    double worst = 0.0;
    for (const Vec& x : grid.nodes()) {
        const MapEval e = flow.eval(x);
        worst = std::max(worst, jet_member(g, e.grad).deviation);
    }
    return worst;
}

} // namespace varinv
