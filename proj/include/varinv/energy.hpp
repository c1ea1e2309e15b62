#pragma once
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "varinv/group.hpp"
#include "varinv/mat.hpp"

#include "json.hpp"

namespace varinv {

enum class DerivMode { Analytic, FiniteDifference };

struct EnergyDerivatives {
    double value = 0.0;
    Mat grad;      // dW/dF
    Hess4 hess;    // d2W/dF dF, symmetrized under (i,j) <-> (k,l)
};

/// A stored-energy style density W(x, y, F).  Catalog entries are all
/// homogeneous (depend on F only) with hand-derived closed-form gradients and
/// Hessians; user densities built from a bare value function fall back to
/// Richardson-extrapolated central differences.
class EnergyDensity {
public:
    using ValueFn = std::function<double(const Vec&, const Vec&, const Mat&)>;
    using GradFn = std::function<Mat(const Vec&, const Vec&, const Mat&)>;
    using HessFn = std::function<Hess4(const Vec&, const Vec&, const Mat&)>;

    static EnergyDensity analytic(std::string name, int n, ValueFn v, GradFn g, HessFn h,
                                  bool depends_x = false, bool depends_y = false);
    static EnergyDensity numeric(std::string name, int n, ValueFn v,
                                 bool depends_x = false, bool depends_y = false);

    const std::string& name() const { return name_; }
    int dim() const { return n_; }
    DerivMode mode() const { return mode_; }
    bool depends_x() const { return depends_x_; }
    bool depends_y() const { return depends_y_; }
    bool homogeneous() const { return !depends_x_ && !depends_y_; }

    double value(const Vec& x, const Vec& y, const Mat& F) const;
    Mat grad(const Vec& x, const Vec& y, const Mat& F) const;
    Hess4 hess(const Vec& x, const Vec& y, const Mat& F) const;
    /// Hessian plus the asymmetry |H - H^T| that was averaged away (always 0
    /// in analytic mode; reported so finite-difference noise is visible).
    std::pair<Hess4, double> hess_with_asymmetry(const Vec& x, const Vec& y, const Mat& F) const;

    /// Shorthands for homogeneous densities.
    double value(const Mat& F) const;
    Mat grad(const Mat& F) const;
    Hess4 hess(const Mat& F) const;

private:
    std::string name_;
    int n_ = 2;
    DerivMode mode_ = DerivMode::Analytic;
    bool depends_x_ = false, depends_y_ = false;
    ValueFn value_;
    GradFn grad_;
    HessFn hess_;
};

EnergyDerivatives energy_derivatives(const EnergyDensity& w, const Vec& x, const Vec& y,
                                     const Mat& F);

// ---- catalog ------------------------------------------------------------

EnergyDensity make_frobenius2(int n);
EnergyDensity make_neg_frobenius2(int n);
EnergyDensity make_det(int n);
/// W(F) = adj(F)_ij (0-based indices, n in {2,3}).
EnergyDensity make_adj_component(int n, int i, int j);
/// W(F) = F_ij.
EnergyDensity make_linear_component(int n, int i, int j);
/// Linear combination  sum lin_ij F_ij + sum adjc_ij adj(F)_ij + detc * det F.
EnergyDensity make_classical_nll(int n, const Mat& lin, const Mat& adjc, double detc);
/// log det F; hard error below det F = 1e-12 rather than -inf.
EnergyDensity make_logdet(int n);
/// Saint Venant-Kirchhoff:  W = lambda/2 (tr E)^2 + mu tr(E^2),
/// E = (F^T F - I)/2.  Rejects mu < 0.  Loses rank-one convexity under
/// strong compression, which is exactly why it is in the catalog.
EnergyDensity make_stvk(int n, double lambda, double mu);
/// log of a multiplicative character (linear in F for shear characters).
EnergyDensity make_char_log(const CharacterSpec& chi);

/// Convex outer functions for polyconvex compositions: h(sum c_i t_i) with
/// h in {identity, square, exp}.
enum class OuterKind { Linear, Square, Exp };
struct OuterConvex {
    OuterKind kind = OuterKind::Square;
    std::vector<double> coeffs;   // one per inner term; defaults to all ones

    double value(const std::vector<double>& t) const;
    std::vector<double> grad(const std::vector<double>& t) const;
    /// Hessian in the inner values; rank-one h'' c c^T.
    std::vector<double> hess(const std::vector<double>& t) const;
};

/// W(F) = g(w_1(F), ..., w_m(F)) with convex g; the inner terms are expected
/// to be invariant integrands (checked by the Jensen tester, not here).
EnergyDensity make_polyconvex(const OuterConvex& g, std::vector<EnergyDensity> terms);

struct CatalogInfo {
    std::string name;
    std::string description;
};
std::vector<CatalogInfo> catalog_list();

/// CLI-facing constructor: name plus JSON parameters.  Unknown names and
/// malformed parameters throw std::invalid_argument.
EnergyDensity catalog_get(const std::string& name, const nlohmann::json& params, int n);

/// Parse {"kind":"shear_exp","c":..,"p":..,"q":..} or
/// {"kind":"diagonal_power","powers":[..]} (p, q are 1-based in configs).
CharacterSpec character_from_json(const nlohmann::json& j, int n);

/// Max abs error of the analytic gradient and Hessian against central
/// finite differences with step h (relative to 1 + |F|).  F must be at
/// distance >= 10h from any domain boundary of the density.
std::pair<double, double> fd_derivative_check(const EnergyDensity& w, const Mat& F, double h);

} // namespace varinv
