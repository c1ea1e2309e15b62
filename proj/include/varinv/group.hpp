#pragma once
#include <array>
#include <cstdint>
#include <string>

#include "varinv/mat.hpp"

namespace varinv {

/// The transformation groups we test against, identified by the matrix set
/// their gradients must stay in:
///   FullDiff         -> GL+(n)           (orientation-preserving, no other constraint)
///   VolumePreserving -> SL(n)            (det = 1)
///   Symplectic2D     -> Sp(1) in R^2     (F w F^T = w for the standard symplectic form)
///   Shear(p,q)       -> { I + s E_pq }   (single off-diagonal one-parameter family)
///   Separable1D      -> (0, inf)         (increasing reparameterizations of an interval)
enum class GroupKind { FullDiff, VolumePreserving, Symplectic2D, Shear, Separable1D };

struct GroupSpec {
    GroupKind kind = GroupKind::FullDiff;
    int n = 2;
    /// Membership slack.  Gradients produced by numerically integrated flows
    /// accumulate drift, hence the loose default; exact constructions are
    /// checked at 1e-12 in the tests.
    double tolerance = 1e-9;
    int p = 0, q = 1;      // Shear only, 0-based, p != q

    static GroupSpec full_diff(int n);
    static GroupSpec volume_preserving(int n);
    static GroupSpec symplectic_2d();
    static GroupSpec shear(int n, int p, int q);
    static GroupSpec separable_1d();

    std::string name() const;
};

struct JetCheck {
    bool member = false;
    /// Distance to exact satisfaction of the defining constraint:
    /// |det-1| for SL, max-norm of F w F^T - w for Sp, total off-pattern
    /// mass for Shear, positivity deficit of det for GL+.
    double deviation = 0.0;
};

/// Checks membership of a gradient in the group's matrix set, within
/// g.tolerance.  Throws on dimension mismatch.
JetCheck jet_member(const GroupSpec& g, const Mat& F);

/// Draws a well-conditioned member of the group's matrix set (deterministic
/// in the seed).  GL+/SL/Sp elements are built as rotation * diag * rotation
/// with diagonal entries in [0.5, 2], so condition numbers stay below 16 and
/// determinants inside [1/8, 8]; shears use s in [-2, 2]; 1D jets lie in
/// [0.25, 4].
Mat random_jet_element(const GroupSpec& g, std::uint64_t seed);

/// Multiplicative characters chi : M -> (0, inf) on a matrix group.
///   ShearExp(c,p,q):     chi(F) = exp(c * F_pq)  on the Shear(p,q) family
///   DiagonalPower(a):    chi(F) = prod F_ii^a_i  on positive diagonal matrices
/// DiagonalPower is used for homomorphism unit tests only.
enum class CharacterKind { ShearExp, DiagonalPower };

struct CharacterSpec {
    CharacterKind kind = CharacterKind::ShearExp;
    int n = 2;
    double c = 1.0;        // ShearExp coefficient
    int p = 0, q = 1;      // ShearExp entry, 0-based
    std::array<double, kMaxDim> powers{};  // DiagonalPower exponents
    double tolerance = 1e-9;

    static CharacterSpec shear_exp(int n, double c, int p, int q);
    static CharacterSpec diagonal_power(int n, const Vec& powers);

    /// Group the character lives on (Shear(p,q) for ShearExp).
    GroupSpec group() const;
    std::string name() const;
};

/// Evaluates the character.  Membership of F in the character's group is
/// checked first; non-members throw std::invalid_argument.
double character_eval(const CharacterSpec& chi, const Mat& F);

/// log chi(F), same membership rules.
double character_log(const CharacterSpec& chi, const Mat& F);

} // namespace varinv
