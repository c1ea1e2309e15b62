#include "varinv/energy.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace varinv {

namespace {

// Levi-Civita symbols.
inline double eps2(int i, int j) { return static_cast<double>(j - i); }  // i,j in {0,1}
inline double eps3(int i, int j, int k) {
    return 0.5 * static_cast<double>((j - i) * (k - j) * (k - i));
}

Vec zero_of(int n) { return Vec::zero(n); }

} // namespace

EnergyDensity EnergyDensity::analytic(std::string name, int n, ValueFn v, GradFn g, HessFn h,
                                      bool depends_x, bool depends_y) {
    EnergyDensity e;
    e.name_ = std::move(name);
    e.n_ = n;
    e.mode_ = DerivMode::Analytic;
    e.depends_x_ = depends_x;
    e.depends_y_ = depends_y;
    e.value_ = std::move(v);
    e.grad_ = std::move(g);
    e.hess_ = std::move(h);
    return e;
}

EnergyDensity EnergyDensity::numeric(std::string name, int n, ValueFn v, bool depends_x,
                                     bool depends_y) {
    EnergyDensity e;
    e.name_ = std::move(name);
    e.n_ = n;
    e.mode_ = DerivMode::FiniteDifference;
    e.depends_x_ = depends_x;
    e.depends_y_ = depends_y;
    e.value_ = std::move(v);
    return e;
}

double EnergyDensity::value(const Vec& x, const Vec& y, const Mat& F) const {
    if (F.dim() != n_) throw std::invalid_argument("energy: argument dimension mismatch");
    return value_(x, y, F);
}

namespace {

// Central differences with one Richardson step; h is scaled by 1 + |F|.
Mat fd_grad(const EnergyDensity::ValueFn& v, const Vec& x, const Vec& y, const Mat& F,
            double h_rel) {
    const int n = F.dim();
    const double h = h_rel * (1.0 + max_abs(F));
    auto diff = [&](double step) {
        Mat d = Mat::zero(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Mat Fp = F, Fm = F;
                Fp(i, j) += step;
                Fm(i, j) -= step;
                d(i, j) = (v(x, y, Fp) - v(x, y, Fm)) / (2.0 * step);
            }
        return d;
    };
    const Mat d1 = diff(h), d2 = diff(0.5 * h);
    Mat r = Mat::zero(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r(i, j) = (4.0 * d2(i, j) - d1(i, j)) / 3.0;
    return r;
}

Hess4 fd_hess(const EnergyDensity::ValueFn& v, const Vec& x, const Vec& y, const Mat& F,
              double h_rel) {
    const int n = F.dim();
    const double h = h_rel * (1.0 + max_abs(F));
    auto second = [&](double step) {
        Hess4 hh(n);
        const double w0 = v(x, y, F);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) {
                        if (i == k && j == l) {
                            Mat Fp = F, Fm = F;
                            Fp(i, j) += step;
                            Fm(i, j) -= step;
                            hh(i, j, k, l) = (v(x, y, Fp) - 2.0 * w0 + v(x, y, Fm)) / (step * step);
                        } else {
                            Mat Fpp = F, Fpm = F, Fmp = F, Fmm = F;
                            Fpp(i, j) += step; Fpp(k, l) += step;
                            Fpm(i, j) += step; Fpm(k, l) -= step;
                            Fmp(i, j) -= step; Fmp(k, l) += step;
                            Fmm(i, j) -= step; Fmm(k, l) -= step;
                            hh(i, j, k, l) = (v(x, y, Fpp) - v(x, y, Fpm) - v(x, y, Fmp) +
                                              v(x, y, Fmm)) / (4.0 * step * step);
                        }
                    }
        return hh;
    };
    Hess4 a = second(h), b = second(0.5 * h);
    Hess4 r(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    r(i, j, k, l) = (4.0 * b(i, j, k, l) - a(i, j, k, l)) / 3.0;
    return r;
}

} // namespace

Mat EnergyDensity::grad(const Vec& x, const Vec& y, const Mat& F) const {
    if (F.dim() != n_) throw std::invalid_argument("energy: argument dimension mismatch");
    if (mode_ == DerivMode::Analytic) return grad_(x, y, F);
    return fd_grad(value_, x, y, F, 1e-5);
}

std::pair<Hess4, double> EnergyDensity::hess_with_asymmetry(const Vec& x, const Vec& y,
                                                            const Mat& F) const {
    if (F.dim() != n_) throw std::invalid_argument("energy: argument dimension mismatch");
    Hess4 h = mode_ == DerivMode::Analytic ? hess_(x, y, F) : fd_hess(value_, x, y, F, 1e-4);
    double asym = 0.0;
    const int n = n_;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    asym = std::max(asym, std::fabs(h(i, j, k, l) - h(k, l, i, j)));
    if (mode_ == DerivMode::FiniteDifference) {
        Hess4 s(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l)
                        s(i, j, k, l) = 0.5 * (h(i, j, k, l) + h(k, l, i, j));
        return {s, asym};
    }
    return {h, asym};
}

Hess4 EnergyDensity::hess(const Vec& x, const Vec& y, const Mat& F) const {
    return hess_with_asymmetry(x, y, F).first;
}

double EnergyDensity::value(const Mat& F) const { return value(zero_of(n_), zero_of(n_), F); }
Mat EnergyDensity::grad(const Mat& F) const { return grad(zero_of(n_), zero_of(n_), F); }
Hess4 EnergyDensity::hess(const Mat& F) const { return hess(zero_of(n_), zero_of(n_), F); }

EnergyDerivatives energy_derivatives(const EnergyDensity& w, const Vec& x, const Vec& y,
                                     const Mat& F) {
    EnergyDerivatives d;
    d.value = w.value(x, y, F);
    d.grad = w.grad(x, y, F);
    d.hess = w.hess(x, y, F);
    return d;
}

// ---- catalog ------------------------------------------------------------

EnergyDensity make_frobenius2(int n) {
    return EnergyDensity::analytic(
        "frobenius2", n,
        [](const Vec&, const Vec&, const Mat& F) { return frob2(F); },
        [](const Vec&, const Vec&, const Mat& F) { return 2.0 * F; },
        [n](const Vec&, const Vec&, const Mat&) {
            Hess4 h(n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) h(i, j, i, j) = 2.0;
            return h;
        });
}

EnergyDensity make_neg_frobenius2(int n) {
    return EnergyDensity::analytic(
        "neg_frobenius2", n,
        [](const Vec&, const Vec&, const Mat& F) { return -frob2(F); },
        [](const Vec&, const Vec&, const Mat& F) { return -2.0 * F; },
        [n](const Vec&, const Vec&, const Mat&) {
            Hess4 h(n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) h(i, j, i, j) = -2.0;
            return h;
        });
}

EnergyDensity make_det(int n) {
    return EnergyDensity::analytic(
        "det", n,
        [](const Vec&, const Vec&, const Mat& F) { return det(F); },
        [](const Vec&, const Vec&, const Mat& F) { return cofactor(F); },
        [n](const Vec&, const Vec&, const Mat& F) {
            Hess4 h(n);
            if (n == 2) {
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                        for (int c = 0; c < 2; ++c)
                            for (int d = 0; d < 2; ++d) h(a, b, c, d) = eps2(a, c) * eps2(b, d);
            } else if (n == 3) {
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b)
                        for (int c = 0; c < 3; ++c)
                            for (int d = 0; d < 3; ++d) {
                                double s = 0.0;
                                for (int k = 0; k < 3; ++k)
                                    for (int m = 0; m < 3; ++m)
                                        s += eps3(a, c, k) * eps3(b, d, m) * F(k, m);
                                h(a, b, c, d) = s;
                            }
            }
            return h;  // n == 1: second derivative vanishes
        });
}

EnergyDensity make_adj_component(int n, int i, int j) {
    if (n < 2 || n > kMaxDim)
        throw std::invalid_argument("adj_component: needs n in {2,3}");
    if (i < 0 || i >= n || j < 0 || j >= n)
        throw std::invalid_argument("adj_component: index out of range");
    const std::string nm =
        "adj_component(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
    if (n == 2) {
        // adj entries are (signed) single entries of F: linear.
        // adj(0,0)=F(1,1), adj(0,1)=-F(0,1), adj(1,0)=-F(1,0), adj(1,1)=F(0,0)
        const int ri = 1 - i, rj = 1 - j;
        const double sign = (i == j) ? 1.0 : -1.0;
        const int src_i = (i == j) ? ri : i;
        const int src_j = (i == j) ? rj : j;
        return EnergyDensity::analytic(
            nm, 2,
            [src_i, src_j, sign](const Vec&, const Vec&, const Mat& F) {
                return sign * F(src_i, src_j);
            },
            [src_i, src_j, sign](const Vec&, const Vec&, const Mat&) {
                Mat g = Mat::zero(2);
                g(src_i, src_j) = sign;
                return g;
            },
            [](const Vec&, const Vec&, const Mat&) { return Hess4(2); });
    }
    // n == 3: adj(F)_ij = cofactor(F)_ji, quadratic in F.
    return EnergyDensity::analytic(
        nm, 3,
        [i, j](const Vec&, const Vec&, const Mat& F) { return adjugate(F)(i, j); },
        [i, j](const Vec&, const Vec&, const Mat& F) {
            Mat g = Mat::zero(3);
            for (int p = 0; p < 3; ++p)
                for (int q = 0; q < 3; ++q) {
                    double s = 0.0;
                    for (int k = 0; k < 3; ++k)
                        for (int m = 0; m < 3; ++m)
                            s += eps3(j, p, k) * eps3(i, q, m) * F(k, m);
                    g(p, q) = s;
                }
            return g;
        },
        [i, j](const Vec&, const Vec&, const Mat&) {
            Hess4 h(3);
            for (int p = 0; p < 3; ++p)
                for (int q = 0; q < 3; ++q)
                    for (int r = 0; r < 3; ++r)
                        for (int s = 0; s < 3; ++s)
                            h(p, q, r, s) = eps3(j, p, r) * eps3(i, q, s);
            return h;
        });
}

EnergyDensity make_linear_component(int n, int i, int j) {
    if (i < 0 || i >= n || j < 0 || j >= n)
        throw std::invalid_argument("linear_component: index out of range");
    const std::string nm =
        "linear_component(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
    return EnergyDensity::analytic(
        nm, n,
        [i, j](const Vec&, const Vec&, const Mat& F) { return F(i, j); },
        [i, j, n](const Vec&, const Vec&, const Mat&) {
            Mat g = Mat::zero(n);
            g(i, j) = 1.0;
            return g;
        },
        [n](const Vec&, const Vec&, const Mat&) { return Hess4(n); });
}

EnergyDensity make_classical_nll(int n, const Mat& lin, const Mat& adjc, double detc) {
    if (n < 2 || n > kMaxDim)
        throw std::invalid_argument("classical_nll: needs n in {2,3}");
    if (lin.dim() != n || adjc.dim() != n)
        throw std::invalid_argument("classical_nll: coefficient dimension mismatch");
    if (!std::isfinite(detc)) throw std::invalid_argument("classical_nll: non-finite coefficient");
    const EnergyDensity d = make_det(n);
    return EnergyDensity::analytic(
        "classical_nll", n,
        [lin, adjc, detc, d](const Vec& x, const Vec& y, const Mat& F) {
            double s = detc * d.value(x, y, F);
            const Mat a = adjugate(F);
            for (int i = 0; i < F.dim(); ++i)
                for (int j = 0; j < F.dim(); ++j) s += lin(i, j) * F(i, j) + adjc(i, j) * a(i, j);
            return s;
        },
        [lin, adjc, detc, d, n](const Vec& x, const Vec& y, const Mat& F) {
            Mat g = detc * d.grad(x, y, F);
            g += lin;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (adjc(i, j) != 0.0) {
                        const EnergyDensity a = make_adj_component(n, i, j);
                        g += adjc(i, j) * a.grad(x, y, F);
                    }
            return g;
        },
        [adjc, detc, d, n](const Vec& x, const Vec& y, const Mat& F) {
            Hess4 h = d.hess(x, y, F);
            h *= detc;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (adjc(i, j) != 0.0) {
                        const EnergyDensity a = make_adj_component(n, i, j);
                        Hess4 ha = a.hess(x, y, F);
                        ha *= adjc(i, j);
                        h += ha;
                    }
            return h;
        });
}

EnergyDensity make_logdet(int n) {
    return EnergyDensity::analytic(
        "logdet", n,
        [](const Vec&, const Vec&, const Mat& F) {
            const double d = det(F);
            if (d <= 1e-12)
                throw std::domain_error("logdet: det F <= 1e-12 (outside the density's domain)");
            return std::log(d);
        },
        [](const Vec&, const Vec&, const Mat& F) {
            const double d = det(F);
            if (d <= 1e-12)
                throw std::domain_error("logdet: det F <= 1e-12 (outside the density's domain)");
            return (1.0 / d) * cofactor(F);
        },
        [n](const Vec&, const Vec&, const Mat& F) {
            const double d = det(F);
            if (d <= 1e-12)
                throw std::domain_error("logdet: det F <= 1e-12 (outside the density's domain)");
            const Mat Fi = inverse(F);
            Hess4 h(n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        for (int l = 0; l < n; ++l) h(i, j, k, l) = -Fi(j, k) * Fi(l, i);
            return h;
        });
}

EnergyDensity make_stvk(int n, double lambda, double mu) {
    if (mu < 0.0) throw std::invalid_argument("stvk: shear modulus mu must be >= 0");
    if (!std::isfinite(lambda) || !std::isfinite(mu))
        throw std::invalid_argument("stvk: non-finite moduli");
    const std::string nm = "stvk(" + std::to_string(lambda) + "," + std::to_string(mu) + ")";
    auto green = [](const Mat& F) {
        Mat e = transpose(F) * F;
        e -= Mat::identity(F.dim());
        return 0.5 * e;
    };
    return EnergyDensity::analytic(
        nm, n,
        [green, lambda, mu](const Vec&, const Vec&, const Mat& F) {
            const Mat E = green(F);
            const double t = trace(E);
            return 0.5 * lambda * t * t + mu * trace(E * E);
        },
        [green, lambda, mu](const Vec&, const Vec&, const Mat& F) {
            const Mat E = green(F);
            // dW/dF = F (lambda tr(E) I + 2 mu E)
            return lambda * trace(E) * F + 2.0 * mu * (F * E);
        },
        [green, lambda, mu, n](const Vec&, const Vec&, const Mat& F) {
            const Mat E = green(F);
            const double t = trace(E);
            const Mat FFt = F * transpose(F);
            Hess4 h(n);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    for (int c = 0; c < n; ++c)
                        for (int d = 0; d < n; ++d) {
                            double v = lambda * F(a, b) * F(c, d);
                            if (a == c && b == d) v += lambda * t;
                            if (a == c) v += 2.0 * mu * E(d, b);
                            v += mu * F(a, d) * F(c, b);
                            if (b == d) v += mu * FFt(a, c);
                            h(a, b, c, d) = v;
                        }
            return h;
        });
}

EnergyDensity make_char_log(const CharacterSpec& chi) {
    const int n = chi.n;
    if (chi.kind == CharacterKind::ShearExp) {
        const double c = chi.c;
        const int p = chi.p, q = chi.q;
        return EnergyDensity::analytic(
            "char_log[" + chi.name() + "]", n,
            [c, p, q](const Vec&, const Vec&, const Mat& F) { return c * F(p, q); },
            [c, p, q, n](const Vec&, const Vec&, const Mat&) {
                Mat g = Mat::zero(n);
                g(p, q) = c;
                return g;
            },
            [n](const Vec&, const Vec&, const Mat&) { return Hess4(n); });
    }
    const auto powers = chi.powers;
    return EnergyDensity::analytic(
        "char_log[diagonal_power]", n,
        [powers, n](const Vec&, const Vec&, const Mat& F) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) {
                if (F(i, i) <= 1e-12)
                    throw std::domain_error("char_log: diagonal entry <= 1e-12");
                s += powers[static_cast<std::size_t>(i)] * std::log(F(i, i));
            }
            return s;
        },
        [powers, n](const Vec&, const Vec&, const Mat& F) {
            Mat g = Mat::zero(n);
            for (int i = 0; i < n; ++i) {
                if (F(i, i) <= 1e-12)
                    throw std::domain_error("char_log: diagonal entry <= 1e-12");
                g(i, i) = powers[static_cast<std::size_t>(i)] / F(i, i);
            }
            return g;
        },
        [powers, n](const Vec&, const Vec&, const Mat& F) {
            Hess4 h(n);
            for (int i = 0; i < n; ++i)
                h(i, i, i, i) = -powers[static_cast<std::size_t>(i)] / (F(i, i) * F(i, i));
            return h;
        });
}

double OuterConvex::value(const std::vector<double>& t) const {
    double z = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
        z += (i < coeffs.size() ? coeffs[i] : 1.0) * t[i];
    switch (kind) {
        case OuterKind::Linear: return z;
        case OuterKind::Square: return z * z;
        case OuterKind::Exp: return std::exp(z);
    }
    return z;
}

std::vector<double> OuterConvex::grad(const std::vector<double>& t) const {
    double z = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
        z += (i < coeffs.size() ? coeffs[i] : 1.0) * t[i];
    double h1 = 1.0;
    if (kind == OuterKind::Square) h1 = 2.0 * z;
    if (kind == OuterKind::Exp) h1 = std::exp(z);
    std::vector<double> g(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) g[i] = h1 * (i < coeffs.size() ? coeffs[i] : 1.0);
    return g;
}

std::vector<double> OuterConvex::hess(const std::vector<double>& t) const {
    double z = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
        z += (i < coeffs.size() ? coeffs[i] : 1.0) * t[i];
    double h2 = 0.0;
    if (kind == OuterKind::Square) h2 = 2.0;
    if (kind == OuterKind::Exp) h2 = std::exp(z);
    std::vector<double> hh(t.size() * t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = 0; j < t.size(); ++j)
            hh[i * t.size() + j] =
                h2 * (i < coeffs.size() ? coeffs[i] : 1.0) * (j < coeffs.size() ? coeffs[j] : 1.0);
    return hh;
}

EnergyDensity make_polyconvex(const OuterConvex& g, std::vector<EnergyDensity> terms) {
    if (terms.empty()) throw std::invalid_argument("polyconvex: needs at least one inner term");
    const int n = terms.front().dim();
    for (const auto& t : terms) {
        if (t.dim() != n) throw std::invalid_argument("polyconvex: inner term dimension mismatch");
        if (!t.homogeneous())
            throw std::invalid_argument("polyconvex: inner terms must be homogeneous");
    }
    auto shared = std::make_shared<std::vector<EnergyDensity>>(std::move(terms));
    auto inner_values = [shared](const Mat& F) {
        std::vector<double> t;
        t.reserve(shared->size());
        for (const auto& w : *shared) t.push_back(w.value(F));
        return t;
    };
    return EnergyDensity::analytic(
        "polyconvex", n,
        [g, inner_values](const Vec&, const Vec&, const Mat& F) {
            return g.value(inner_values(F));
        },
        [g, shared, inner_values, n](const Vec&, const Vec&, const Mat& F) {
            const auto t = inner_values(F);
            const auto gg = g.grad(t);
            Mat out = Mat::zero(n);
            for (std::size_t m = 0; m < shared->size(); ++m)
                out += gg[m] * (*shared)[m].grad(F);
            return out;
        },
        [g, shared, inner_values, n](const Vec&, const Vec&, const Mat& F) {
            const auto t = inner_values(F);
            const auto gg = g.grad(t);
            const auto ghh = g.hess(t);
            std::vector<Mat> grads;
            grads.reserve(shared->size());
            for (const auto& w : *shared) grads.push_back(w.grad(F));
            Hess4 out(n);
            for (std::size_t m = 0; m < shared->size(); ++m) {
                Hess4 hm = (*shared)[m].hess(F);
                hm *= gg[m];
                out += hm;
            }
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        for (int l = 0; l < n; ++l) {
                            double s = 0.0;
                            for (std::size_t a = 0; a < shared->size(); ++a)
                                for (std::size_t b = 0; b < shared->size(); ++b)
                                    s += ghh[a * shared->size() + b] * grads[a](i, j) *
                                         grads[b](k, l);
                            out(i, j, k, l) += s;
                        }
            return out;
        });
}

std::vector<CatalogInfo> catalog_list() {
    return {
        {"adj_component", "single adjugate entry adj(F)_ij; classical null lagrangian"},
        {"char_log", "log of a multiplicative character on a matrix subgroup"},
        {"classical_nll", "linear combination of entries, adjugate entries and det"},
        {"det", "determinant of F; classical null lagrangian"},
        {"frobenius2", "squared Frobenius norm |F|^2; convex, passes every invariance test"},
        {"linear_component", "single entry F_ij; classical null lagrangian"},
        {"logdet", "log det F; invariant integrand for volume-preserving flows"},
        {"neg_frobenius2", "-|F|^2; deliberately fails quasiconvexity, exercises witnesses"},
        {"polyconvex", "convex outer function of null-lagrangian inner values"},
        {"stvk", "Saint Venant-Kirchhoff energy; loses rank-one convexity in compression"},
    };
}

namespace {

Mat mat_from_json(const nlohmann::json& j, int n, const std::string& where) {
    if (!j.is_array() || static_cast<int>(j.size()) != n)
        throw std::invalid_argument(where + ": expected " + std::to_string(n) + " rows");
    Mat m = Mat::zero(n);
    for (int i = 0; i < n; ++i) {
        const auto& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            throw std::invalid_argument(where + ": row " + std::to_string(i) + " malformed");
        for (int k = 0; k < n; ++k) {
            const auto& e = row[static_cast<std::size_t>(k)];
            if (!e.is_number()) throw std::invalid_argument(where + ": non-numeric entry");
            m(i, k) = e.get<double>();
        }
    }
    return m;
}

int index_param(const nlohmann::json& p, const char* key, int n) {
    if (!p.contains(key) || !p[key].is_number_integer())
        throw std::invalid_argument(std::string("energy.params.") + key + ": required integer");
    const int v = p[key].get<int>();
    if (v < 1 || v > n)
        throw std::invalid_argument(std::string("energy.params.") + key + ": out of range");
    return v - 1;   // config uses 1-based indices
}

} // namespace

CharacterSpec character_from_json(const nlohmann::json& j, int n) {
    if (!j.is_object() || !j.contains("kind"))
        throw std::invalid_argument("character: expected object with 'kind'");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "shear_exp") {
        const double c = j.value("c", 1.0);
        const int p = index_param(j, "p", n);
        const int q = index_param(j, "q", n);
        return CharacterSpec::shear_exp(n, c, p, q);
    }
    if (kind == "diagonal_power") {
        if (!j.contains("powers") || !j["powers"].is_array() ||
            static_cast<int>(j["powers"].size()) != n)
            throw std::invalid_argument("character.powers: expected array of length n");
        Vec p(n);
        for (int i = 0; i < n; ++i) p[i] = j["powers"][static_cast<std::size_t>(i)].get<double>();
        return CharacterSpec::diagonal_power(n, p);
    }
    throw std::invalid_argument("character.kind: unknown kind '" + kind + "'");
}

EnergyDensity catalog_get(const std::string& name, const nlohmann::json& params, int n) {
    const nlohmann::json p = params.is_null() ? nlohmann::json::object() : params;
    if (name == "frobenius2") return make_frobenius2(n);
    if (name == "neg_frobenius2") return make_neg_frobenius2(n);
    if (name == "det") return make_det(n);
    if (name == "logdet") return make_logdet(n);
    if (name == "adj_component")
        return make_adj_component(n, index_param(p, "i", n), index_param(p, "j", n));
    if (name == "linear_component")
        return make_linear_component(n, index_param(p, "i", n), index_param(p, "j", n));
    if (name == "classical_nll") {
        Mat lin = p.contains("linear") ? mat_from_json(p["linear"], n, "energy.params.linear")
                                       : Mat::zero(n);
        Mat adjc = p.contains("adj") ? mat_from_json(p["adj"], n, "energy.params.adj")
                                     : Mat::zero(n);
        const double detc = p.value("det", 0.0);
        return make_classical_nll(n, lin, adjc, detc);
    }
    if (name == "stvk") {
        if (!p.contains("lambda") || !p.contains("mu"))
            throw std::invalid_argument("energy.params: stvk needs 'lambda' and 'mu'");
        return make_stvk(n, p["lambda"].get<double>(), p["mu"].get<double>());
    }
    if (name == "char_log") {
        if (!p.contains("character"))
            throw std::invalid_argument("energy.params.character: required for char_log");
        return make_char_log(character_from_json(p["character"], n));
    }
    if (name == "polyconvex") {
        OuterConvex g;
        if (p.contains("outer")) {
            const auto& o = p["outer"];
            const std::string k = o.value("kind", std::string("square"));
            if (k == "linear") g.kind = OuterKind::Linear;
            else if (k == "square") g.kind = OuterKind::Square;
            else if (k == "exp") g.kind = OuterKind::Exp;
            else throw std::invalid_argument("energy.params.outer.kind: unknown '" + k + "'");
            if (o.contains("coeffs"))
                for (const auto& c : o["coeffs"]) g.coeffs.push_back(c.get<double>());
        }
        if (!p.contains("terms") || !p["terms"].is_array() || p["terms"].empty())
            throw std::invalid_argument("energy.params.terms: non-empty array required");
        std::vector<EnergyDensity> terms;
        for (const auto& t : p["terms"])
            terms.push_back(catalog_get(t.value("name", std::string()),
                                        t.contains("params") ? t["params"] : nlohmann::json(),
                                        n));
        return make_polyconvex(g, std::move(terms));
    }
    throw std::invalid_argument("energy.name: unknown energy '" + name + "'");
}

std::pair<double, double> fd_derivative_check(const EnergyDensity& w, const Mat& F, double h) {
    const Vec x = Vec::zero(w.dim()), y = Vec::zero(w.dim());
    auto vf = [&w](const Vec& a, const Vec& b, const Mat& m) { return w.value(a, b, m); };
    const Mat g_fd = fd_grad(vf, x, y, F, h);
    const Hess4 h_fd = fd_hess(vf, x, y, F, std::sqrt(h) * 0.03);
    const Mat g = w.grad(x, y, F);
    const Hess4 hh = w.hess(x, y, F);
    double ge = max_abs(g - g_fd);
    double he = 0.0;
    const int n = w.dim();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    he = std::max(he, std::fabs(hh(i, j, k, l) - h_fd(i, j, k, l)));
    return {ge, he};
}

} // namespace varinv
