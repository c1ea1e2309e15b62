#include "varinv/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "varinv/parallel.hpp"
#include "varinv/rng.hpp"

namespace varinv {

namespace {

inline double eps3(int i, int j, int k) {
    return 0.5 * static_cast<double>((j - i) * (k - j) * (k - i));
}

} // namespace

BoundaryReport boundary_integrals(const PointMap& u, const BoxDomain& dom,
                                  bool require_orientation) {
    const int n = u.dim();
    if (dom.dim() != n) throw std::invalid_argument("boundary: dimension mismatch");
    const auto& nodes = dom.nodes();
    const auto& weights = dom.weights();
    const std::size_t count = nodes.size();

    // Per-node volume data: n^2 grad entries, n^2 adj entries, det.
    const std::size_t stride = static_cast<std::size_t>(2 * n * n + 1);
    std::vector<double> buf(count * stride, 0.0);
    std::vector<std::string> errs(count);
    parallel_for(count, [&](std::size_t k) {
        try {
            const MapEval e = u.eval(nodes[k]);
            double* slot = buf.data() + k * stride;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) slot[i * n + j] = e.grad(i, j);
            if (n >= 2) {
                const Mat a = adjugate(e.grad);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) slot[n * n + i * n + j] = a(i, j);
            }
            slot[2 * n * n] = det(e.grad);
        } catch (const std::exception& ex) {
            errs[k] = ex.what();
        }
    });

    BoundaryReport rep;
    rep.vol_grad = rep.surf_grad = rep.vol_adj = rep.surf_adj = Mat::zero(n);
    rep.min_det = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < count; ++k) {
        if (!errs[k].empty())
            throw std::runtime_error("boundary: map evaluation failed at a volume node: " +
                                     errs[k]);
        const double* slot = buf.data() + k * stride;
        const double d = slot[2 * n * n];
        rep.min_det = std::min(rep.min_det, d);
        if (require_orientation && d <= 0.0)
            throw std::domain_error("boundary: det(grad u) <= 0 at a volume node (value " +
                                    std::to_string(d) + ")");
        const double w = weights[k];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                rep.vol_grad(i, j) += w * slot[i * n + j];
                rep.vol_adj(i, j) += w * slot[n * n + i * n + j];
            }
        rep.vol_det += w * d;
    }

    for (const SurfaceNode& sn : surface_nodes(dom)) {
        const MapEval e = u.eval(sn.x);
        const double w = sn.w;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) rep.surf_grad(i, j) += w * e.y[i] * sn.normal[j];
        if (n == 2) {
            Mat uon = Mat::zero(2);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) uon(i, j) = e.y[i] * sn.normal[j];
            const Mat a = adjugate(uon);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) rep.surf_adj(i, j) += w * a(i, j);
        } else if (n == 3) {
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    double s = 0.0;
                    for (int p = 0; p < 3; ++p)
                        for (int q = 0; q < 3; ++q)
                            for (int m = 0; m < 3; ++m)
                                for (int r = 0; r < 3; ++r)
                                    s += eps3(j, p, q) * eps3(i, m, r) * e.y[p] * e.grad(q, r) *
                                         sn.normal[m];
                    rep.surf_adj(i, j) += 0.5 * w * s;
                }
        }
        const Vec cn = cofactor(e.grad) * sn.normal;
        rep.surf_det += w * dot(e.y, cn) / static_cast<double>(n);
    }
    return rep;
}

ImageVolume image_volume_mc(const DeformationMap& u, const BoxDomain& dom,
                            std::size_t samples, std::uint64_t seed) {
    const int n = u.dim();
    if (dom.dim() != n) throw std::invalid_argument("image volume: dimension mismatch");
    if (samples == 0) throw std::invalid_argument("image volume: need samples > 0");
    const Mat F = u.linear();
    const Vec b = u.offset();
    const double dF = det(F);
    if (dF <= 0.0)
        throw std::domain_error("image volume: affine part must be orientation preserving");
    const Box& box = dom.box();

    std::vector<unsigned char> hit(samples, 0);
    parallel_for(samples, [&](std::size_t k) {
        SplitMix64 rng(substream(seed, k));
        Vec x(n);
        for (int i = 0; i < n; ++i) x[i] = rng.uniform(box.lo[i], box.hi[i]);
        // Uniform draw in the affine image of the box; x is also the natural
        // Newton seed, being the exact preimage under the affine part.
        const Vec y = b + F * x;
        const double tol = 1e-12 * (1.0 + max_abs(y));
        // Damped Newton with a few jittered restarts; bump distortion can
        // make the undamped iteration overshoot near the support edge.
        for (int attempt = 0; attempt < 8 && !hit[k]; ++attempt) {
            Vec z = x;
            if (attempt > 0)
                for (int i = 0; i < n; ++i)
                    z[i] += 0.25 * (box.hi[i] - box.lo[i]) * rng.uniform(-1.0, 1.0);
            try {
                MapEval e = u.eval(z);
                double rn = max_abs(e.y - y);
                for (int it = 0; it < 80; ++it) {
                    if (rn <= tol) {
                        if (box.contains(z, 1e-9)) hit[k] = 1;
                        break;
                    }
                    const Vec step = inverse(e.grad) * (e.y - y);
                    double lambda = 1.0;
                    for (int cut = 0; cut < 30; ++cut) {
                        const Vec zt = z - lambda * step;
                        const MapEval et = u.eval(zt);
                        const double rt = max_abs(et.y - y);
                        if (rt < rn || lambda < 1e-6) {
                            z = zt;
                            e = et;
                            rn = rt;
                            break;
                        }
                        lambda *= 0.5;
                    }
                }
            } catch (const std::exception&) {
                // Singular Jacobian along this path: try the next restart.
            }
        }
    });

    std::size_t h = 0;
    for (std::size_t k = 0; k < samples; ++k) h += hit[k];
    ImageVolume out;
    out.hits = h;
    out.samples = samples;
    out.estimate = dF * dom.volume() * static_cast<double>(h) / static_cast<double>(samples);
    return out;
}

} // namespace varinv
