#include "varinv/mat.hpp"

#include <cmath>
#include <stdexcept>

namespace varinv {

namespace {
void check_dim(int n) {
    if (n < 1 || n > kMaxDim) throw std::invalid_argument("dimension must be 1, 2 or 3");
}
} // namespace

Vec::Vec(int n) : n_(n) { check_dim(n); }

Vec::Vec(std::initializer_list<double> vals) {
    check_dim(static_cast<int>(vals.size()));
    n_ = static_cast<int>(vals.size());
    int i = 0;
    for (double v : vals) {
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite vector entry");
        v_[static_cast<std::size_t>(i++)] = v;
    }
}

Vec& Vec::operator+=(const Vec& o) {
    for (int i = 0; i < n_; ++i) v_[static_cast<std::size_t>(i)] += o[i];
    return *this;
}
Vec& Vec::operator-=(const Vec& o) {
    for (int i = 0; i < n_; ++i) v_[static_cast<std::size_t>(i)] -= o[i];
    return *this;
}
Vec& Vec::operator*=(double s) {
    for (int i = 0; i < n_; ++i) v_[static_cast<std::size_t>(i)] *= s;
    return *this;
}

Vec operator+(Vec a, const Vec& b) { return a += b; }
Vec operator-(Vec a, const Vec& b) { return a -= b; }
Vec operator*(double s, Vec a) { return a *= s; }

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
    return s;
}
double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }
double max_abs(const Vec& a) {
    double m = 0.0;
    for (int i = 0; i < a.dim(); ++i) m = std::max(m, std::fabs(a[i]));
    return m;
}

Mat Mat::zero(int n) {
    check_dim(n);
    Mat m;
    m.n_ = n;
    return m;
}

Mat Mat::identity(int n) {
    Mat m = zero(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat Mat::diag(const Vec& d) {
    Mat m = zero(d.dim());
    for (int i = 0; i < d.dim(); ++i) m(i, i) = d[i];
    return m;
}

Mat Mat::from_entries(int n, const double* vals) {
    Mat m = zero(n);
    for (int i = 0; i < n * n; ++i) {
        if (!std::isfinite(vals[i])) throw std::invalid_argument("non-finite matrix entry");
        m.m_[static_cast<std::size_t>(i)] = vals[i];
    }
    return m;
}

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows) {
    check_dim(static_cast<int>(rows.size()));
    n_ = static_cast<int>(rows.size());
    int i = 0;
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != n_)
            throw std::invalid_argument("matrix rows must have equal length");
        int j = 0;
        for (double v : row) {
            if (!std::isfinite(v)) throw std::invalid_argument("non-finite matrix entry");
            (*this)(i, j++) = v;
        }
        ++i;
    }
}

Mat& Mat::operator+=(const Mat& o) {
    for (int i = 0; i < n_ * n_; ++i) m_[static_cast<std::size_t>(i)] += o.m_[static_cast<std::size_t>(i)];
    return *this;
}
Mat& Mat::operator-=(const Mat& o) {
    for (int i = 0; i < n_ * n_; ++i) m_[static_cast<std::size_t>(i)] -= o.m_[static_cast<std::size_t>(i)];
    return *this;
}
Mat& Mat::operator*=(double s) {
    for (int i = 0; i < n_ * n_; ++i) m_[static_cast<std::size_t>(i)] *= s;
    return *this;
}

Mat operator+(Mat a, const Mat& b) { return a += b; }
Mat operator-(Mat a, const Mat& b) { return a -= b; }
Mat operator*(double s, Mat a) { return a *= s; }

Mat operator*(const Mat& a, const Mat& b) {
    const int n = a.dim();
    Mat c = Mat::zero(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

Vec operator*(const Mat& a, const Vec& x) {
    const int n = a.dim();
    Vec y(n);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

Mat transpose(const Mat& a) {
    const int n = a.dim();
    Mat t = Mat::zero(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) t(i, j) = a(j, i);
    return t;
}

double trace(const Mat& a) {
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i) s += a(i, i);
    return s;
}

double max_abs(const Mat& a) {
    double m = 0.0;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) m = std::max(m, std::fabs(a(i, j)));
    return m;
}

double frob2(const Mat& a) {
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) s += a(i, j) * a(i, j);
    return s;
}

double det(const Mat& a) {
    switch (a.dim()) {
        case 1:
            return a(0, 0);
        case 2:
            return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
        case 3:
            return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
                 - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
                 + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
        default:
            throw std::invalid_argument("det: empty matrix");
    }
}

Mat adjugate(const Mat& a) {
    switch (a.dim()) {
        case 2: {
            Mat r = Mat::zero(2);
            r(0, 0) = a(1, 1);
            r(0, 1) = -a(0, 1);
            r(1, 0) = -a(1, 0);
            r(1, 1) = a(0, 0);
            return r;
        }
        case 3: {
            Mat r = Mat::zero(3);
            // adj(i,j) = cofactor(j,i)
            r(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
            r(0, 1) = -(a(0, 1) * a(2, 2) - a(0, 2) * a(2, 1));
            r(0, 2) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
            r(1, 0) = -(a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0));
            r(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
            r(1, 2) = -(a(0, 0) * a(1, 2) - a(0, 2) * a(1, 0));
            r(2, 0) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
            r(2, 1) = -(a(0, 0) * a(2, 1) - a(0, 1) * a(2, 0));
            r(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
            return r;
        }
        default:
            throw std::invalid_argument("adjugate: defined for n in {2,3} only");
    }
}

Mat cofactor(const Mat& a) {
    if (a.dim() == 1) {
        Mat r = Mat::zero(1);
        r(0, 0) = 1.0;
        return r;
    }
    return transpose(adjugate(a));
}

Mat inverse(const Mat& a) {
    const double d = det(a);
    const double scale = std::max(1.0, max_abs(a));
    if (std::fabs(d) < 1e-14 * scale)
        throw std::domain_error("inverse: matrix is numerically singular");
    if (a.dim() == 1) {
        Mat r = Mat::zero(1);
        r(0, 0) = 1.0 / d;
        return r;
    }
    return (1.0 / d) * adjugate(a);
}

Hess4& Hess4::operator+=(const Hess4& o) {
    for (std::size_t i = 0; i < h_.size(); ++i) h_[i] += o.h_[i];
    return *this;
}

Hess4& Hess4::operator*=(double s) {
    for (std::size_t i = 0; i < h_.size(); ++i) h_[i] *= s;
    return *this;
}

} // namespace varinv
