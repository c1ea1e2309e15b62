#pragma once
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace varinv {

/// Eigenvalues of a dense symmetric m x m matrix (row-major, m <= 9) by
/// cyclic Jacobi rotations, returned ascending.  Sizes here are tiny (Gram
/// matrices of gradient components, acoustic tensors), so O(m^3) per sweep
/// is irrelevant; what matters is that convergence is unconditional.
inline std::vector<double> symmetric_eigenvalues(std::vector<double> a, int m) {
    if (m < 1 || m > 9) throw std::invalid_argument("eig: order must be in [1, 9]");
    if (a.size() != static_cast<std::size_t>(m) * static_cast<std::size_t>(m))
        throw std::invalid_argument("eig: matrix size mismatch");
    auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i * m + j)]; };
    double scale = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            if (!std::isfinite(at(i, j))) throw std::invalid_argument("eig: non-finite entry");
            scale = std::max(scale, std::fabs(at(i, j)));
        }
    if (scale == 0.0) return std::vector<double>(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            const double sym = 0.5 * (at(i, j) + at(j, i));
            at(i, j) = at(j, i) = sym;
        }

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) off = std::max(off, std::fabs(at(i, j)));
        if (off <= 1e-15 * scale) break;
        for (int p = 0; p < m; ++p)
            for (int q = p + 1; q < m; ++q) {
                const double apq = at(p, q);
                if (std::fabs(apq) <= 1e-300) continue;
                const double theta = 0.5 * (at(q, q) - at(p, p)) / apq;
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < m; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < m; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) ev[static_cast<std::size_t>(i)] = at(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

} // namespace varinv
