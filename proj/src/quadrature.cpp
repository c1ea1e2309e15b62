#include "varinv/quadrature.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "varinv/parallel.hpp"

namespace varinv {

Box::Box(Vec lo_, Vec hi_) : lo(lo_), hi(hi_) {
    if (lo.dim() != hi.dim()) throw std::invalid_argument("box: corner dimensions differ");
    for (int i = 0; i < lo.dim(); ++i)
        if (!(hi[i] > lo[i])) throw std::invalid_argument("box: needs hi > lo on every axis");
}

Box Box::unit_cube(int n) {
    return Box(Vec::zero(n), [n] {
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = 1.0;
        return v;
    }());
}

double Box::volume() const {
    double v = 1.0;
    for (int i = 0; i < dim(); ++i) v *= extent(i);
    return v;
}

bool Box::contains(const Vec& x, double slack) const {
    for (int i = 0; i < dim(); ++i)
        if (x[i] < lo[i] - slack || x[i] > hi[i] + slack) return false;
    return true;
}

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
    if (order < 1 || order > 16)
        throw std::invalid_argument("gauss_legendre: order must be in [1,16]");
    nodes.assign(static_cast<std::size_t>(order), 0.0);
    weights.assign(static_cast<std::size_t>(order), 0.0);
    const double pi = 3.14159265358979323846;
    for (int k = 0; k < (order + 1) / 2; ++k) {
        // Chebyshev-style initial guess, then Newton on P_order.
        double t = std::cos(pi * (k + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = t;
            for (int j = 2; j <= order; ++j) {
                const double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::fabs(dt) < 1e-15) {
                // one final recurrence pass so dp matches the converged t
                p0 = 1.0;
                p1 = t;
                for (int j = 2; j <= order; ++j) {
                    const double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                dp = order * (t * p1 - p0) / (t * t - 1.0);
                break;
            }
        }
        const double w = 2.0 / ((1.0 - t * t) * dp * dp);
        nodes[static_cast<std::size_t>(k)] = -t;  // ascending order
        weights[static_cast<std::size_t>(k)] = w;
        nodes[static_cast<std::size_t>(order - 1 - k)] = t;
        weights[static_cast<std::size_t>(order - 1 - k)] = w;
    }
    if (order % 2 == 1) nodes[static_cast<std::size_t>(order / 2)] = 0.0;
}

namespace {

// Per-axis composite rule: cells * order (coordinate, weight) pairs.
void axis_rule(double lo, double hi, int cells, int order,
               std::vector<double>& coords, std::vector<double>& ws) {
    std::vector<double> gx, gw;
    gauss_legendre(order, gx, gw);
    coords.clear();
    ws.clear();
    const double h = (hi - lo) / cells;
    for (int c = 0; c < cells; ++c) {
        const double a = lo + c * h;
        for (int k = 0; k < order; ++k) {
            coords.push_back(a + 0.5 * h * (gx[static_cast<std::size_t>(k)] + 1.0));
            ws.push_back(0.5 * h * gw[static_cast<std::size_t>(k)]);
        }
    }
}

} // namespace

BoxDomain::BoxDomain(Box box, int cells, int order) : box_(box), cells_(cells), order_(order) {
    if (cells < 1) throw std::invalid_argument("BoxDomain: cells must be >= 1");
    const int n = box_.dim();
    std::vector<std::vector<double>> cs(static_cast<std::size_t>(n)), ws(static_cast<std::size_t>(n));
    std::size_t total = 1;
    for (int a = 0; a < n; ++a) {
        axis_rule(box_.lo[a], box_.hi[a], cells, order, cs[static_cast<std::size_t>(a)],
                  ws[static_cast<std::size_t>(a)]);
        total *= cs[static_cast<std::size_t>(a)].size();
    }
    nodes_.reserve(total);
    weights_.reserve(total);
    // Lexicographic tensor product, axis 0 slowest.
    std::array<std::size_t, kMaxDim> idx{};
    for (std::size_t flat = 0; flat < total; ++flat) {
        Vec x(n);
        double w = 1.0;
        for (int a = 0; a < n; ++a) {
            x[a] = cs[static_cast<std::size_t>(a)][idx[static_cast<std::size_t>(a)]];
            w *= ws[static_cast<std::size_t>(a)][idx[static_cast<std::size_t>(a)]];
        }
        nodes_.push_back(x);
        weights_.push_back(w);
        for (int a = n - 1; a >= 0; --a) {
            auto& i = idx[static_cast<std::size_t>(a)];
            if (++i < cs[static_cast<std::size_t>(a)].size()) break;
            i = 0;
        }
    }
}

namespace {

std::string node_string(const Vec& x) {
    std::ostringstream os;
    os << "(";
    for (int i = 0; i < x.dim(); ++i) {
        if (i) os << ", ";
        os << x[i];
    }
    os << ")";
    return os.str();
}

} // namespace

double integrate(const BoxDomain& dom, const std::function<double(const Vec&)>& f) {
    const auto& xs = dom.nodes();
    const auto& ws = dom.weights();
    std::vector<double> vals(xs.size());
    std::vector<std::string> errs(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) {
        try {
            vals[i] = f(xs[i]);
        } catch (const std::exception& e) {
            errs[i] = e.what();
        }
    });
    double s = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!errs[i].empty())
            throw std::runtime_error("integrand failed at node " + node_string(xs[i]) + ": " + errs[i]);
        if (!std::isfinite(vals[i]))
            throw std::runtime_error("integrand non-finite at node " + node_string(xs[i]));
        s += ws[i] * vals[i];
    }
    return s;
}

std::vector<SurfaceNode> surface_nodes(const BoxDomain& dom) {
    const int n = dom.dim();
    const Box& b = dom.box();
    std::vector<SurfaceNode> out;
    if (n == 1) {
        for (int side = 0; side < 2; ++side) {
            SurfaceNode sn;
            sn.x = Vec(1);
            sn.x[0] = side == 0 ? b.lo[0] : b.hi[0];
            sn.normal = Vec(1);
            sn.normal[0] = side == 0 ? -1.0 : 1.0;
            sn.w = 1.0;
            out.push_back(sn);
        }
        return out;
    }
    // Face of axis a at each side, tensor rule over the remaining axes.
    for (int a = 0; a < n; ++a) {
        std::vector<std::vector<double>> cs, ws;
        std::vector<int> axes;
        for (int o = 0; o < n; ++o) {
            if (o == a) continue;
            std::vector<double> c, w;
            axis_rule(b.lo[o], b.hi[o], dom.cells(), dom.order(), c, w);
            cs.push_back(c);
            ws.push_back(w);
            axes.push_back(o);
        }
        std::size_t total = 1;
        for (const auto& c : cs) total *= c.size();
        for (int side = 0; side < 2; ++side) {
            std::array<std::size_t, kMaxDim> idx{};
            for (std::size_t flat = 0; flat < total; ++flat) {
                SurfaceNode sn;
                sn.x = Vec(n);
                sn.x[a] = side == 0 ? b.lo[a] : b.hi[a];
                sn.w = 1.0;
                for (std::size_t d = 0; d < cs.size(); ++d) {
                    sn.x[axes[d]] = cs[d][idx[d]];
                    sn.w *= ws[d][idx[d]];
                }
                sn.normal = Vec::zero(n);
                sn.normal[a] = side == 0 ? -1.0 : 1.0;
                out.push_back(sn);
                for (int d = static_cast<int>(cs.size()) - 1; d >= 0; --d) {
                    auto& i = idx[static_cast<std::size_t>(d)];
                    if (++i < cs[static_cast<std::size_t>(d)].size()) break;
                    i = 0;
                }
            }
        }
    }
    return out;
}

} // namespace varinv
