#pragma once
#include <array>
#include <cstddef>
#include <initializer_list>

namespace varinv {

/// Everything in the toolkit lives in dimension 1, 2 or 3, so the small
/// containers below carry a runtime dimension inside fixed storage and the
/// determinant/adjugate are closed-form cofactor expansions.  No general
/// linear algebra is needed (or wanted) here.
inline constexpr int kMaxDim = 3;

class Vec {
public:
    Vec() = default;
    explicit Vec(int n);
    Vec(std::initializer_list<double> vals);   // dimension = list size
    static Vec zero(int n) { return Vec(n); }

    int dim() const { return n_; }
    double& operator[](int i) { return v_[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return v_[static_cast<std::size_t>(i)]; }

    Vec& operator+=(const Vec& o);
    Vec& operator-=(const Vec& o);
    Vec& operator*=(double s);

private:
    int n_ = 0;
    std::array<double, kMaxDim> v_{};
};

Vec operator+(Vec a, const Vec& b);
Vec operator-(Vec a, const Vec& b);
Vec operator*(double s, Vec a);
double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);       // Euclidean
double max_abs(const Vec& a);

/// Square matrix, row-major.  Construction from user-facing entry data
/// rejects non-finite values; results of internal arithmetic are not
/// re-validated.
class Mat {
public:
    Mat() = default;
    static Mat zero(int n);
    static Mat identity(int n);
    static Mat diag(const Vec& d);
    /// Validating constructor from row-major entries.
    static Mat from_entries(int n, const double* vals);
    Mat(std::initializer_list<std::initializer_list<double>> rows);

    int dim() const { return n_; }
    double& operator()(int i, int j) { return m_[static_cast<std::size_t>(i * n_ + j)]; }
    double operator()(int i, int j) const { return m_[static_cast<std::size_t>(i * n_ + j)]; }

    Mat& operator+=(const Mat& o);
    Mat& operator-=(const Mat& o);
    Mat& operator*=(double s);

private:
    int n_ = 0;
    std::array<double, kMaxDim * kMaxDim> m_{};
};

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator*(double s, Mat a);
Mat operator*(const Mat& a, const Mat& b);
Vec operator*(const Mat& a, const Vec& x);
Mat transpose(const Mat& a);
double trace(const Mat& a);
double max_abs(const Mat& a);
double frob2(const Mat& a);       // sum of squared entries

double det(const Mat& a);
/// Adjugate (transposed cofactor matrix): adj(M) * M = det(M) * I.
/// Defined for n in {2,3}; the 1x1 case is rejected because the identity
/// degenerates and callers always want det there instead.
Mat adjugate(const Mat& a);
/// Cofactor matrix, i.e. the gradient of det.
Mat cofactor(const Mat& a);
/// Inverse via adjugate/det; throws when |det| is below 1e-14 * scale.
Mat inverse(const Mat& a);

/// Fourth-order coefficient array H(i,j,k,l), e.g. an energy Hessian
/// d2W / dF_ij dF_kl.
class Hess4 {
public:
    Hess4() = default;
    explicit Hess4(int n) : n_(n) {}
    int dim() const { return n_; }
    double& operator()(int i, int j, int k, int l) {
        return h_[static_cast<std::size_t>(((i * n_ + j) * n_ + k) * n_ + l)];
    }
    double operator()(int i, int j, int k, int l) const {
        return h_[static_cast<std::size_t>(((i * n_ + j) * n_ + k) * n_ + l)];
    }
    Hess4& operator+=(const Hess4& o);
    Hess4& operator*=(double s);

private:
    int n_ = 0;
    std::array<double, 81> h_{};
};

/// Third-order array T(i,j,k), e.g. second derivatives u_i,jk of a map
/// (symmetric in j,k by construction).
class Rank3 {
public:
    Rank3() = default;
    explicit Rank3(int n) : n_(n) {}
    int dim() const { return n_; }
    double& operator()(int i, int j, int k) {
        return t_[static_cast<std::size_t>((i * n_ + j) * n_ + k)];
    }
    double operator()(int i, int j, int k) const {
        return t_[static_cast<std::size_t>((i * n_ + j) * n_ + k)];
    }

private:
    int n_ = 0;
    std::array<double, 27> t_{};
};

} // namespace varinv
