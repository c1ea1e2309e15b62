#pragma once
#include <cstdint>
#include <vector>

#include "varinv/boundary.hpp"
#include "varinv/map.hpp"
#include "varinv/report.hpp"
#include "varinv/sampling.hpp"

namespace varinv {

/// ---- integral inequality checks ----------------------------------------
///
/// Margins are normalized per unit volume and per unit |W(F)|; pass means no
/// sampled margin dipped below -tol.  A pass is evidence, not proof, which
/// the report's caveat states explicitly: flow ensembles only reach group
/// elements connected to the identity through exponentials of admissible
/// fields.

/// integral of W(F J) (Left) resp. W(J F) (Right) over the domain must not
/// fall below |domain| W(F), for every jet and every ensemble flow.
TestReport test_lower_invariance(const EnergyDensity& w, const BoxDomain& dom,
                                 const std::vector<Mat>& jets, const FlowEnsemble& ens,
                                 Side side, double tol);

/// Plain quasiconvexity at a jet: integral of W(F + grad eta) over the
/// domain vs |domain| W(F) for sampled compactly supported bump fields.
/// When a violating field is found it is sharpened by coordinate descent on
/// its bump parameters before being reported as the witness.
TestReport test_quasiconvexity(const EnergyDensity& w, const Mat& F, const BoxDomain& dom,
                               int count, std::uint64_t seed, double tol, bool refine = true);

/// Same condition along flow-induced perturbations eta = F (phi - id); the
/// perturbed gradient is assembled additively as F + F (J - I), which must
/// reproduce the lower-invariance margins of W(F J) up to rounding.
TestReport test_quasiconvexity(const EnergyDensity& w, const Mat& F, const BoxDomain& dom,
                               const FlowEnsemble& ens, double tol);

/// Jensen route for compositions g(w_1, .., w_m) with convex g: each inner
/// term must be an exact null lagrangian (verified up to nll_tol on a small
/// ensemble first; a failure there is an invalid-argument error, not a
/// verdict), and then every sampled perturbation margin must be >= -tol.
TestReport test_polyconvex_jensen(const OuterConvex& outer,
                                  const std::vector<EnergyDensity>& terms, const Mat& F,
                                  const BoxDomain& dom, int count, std::uint64_t seed,
                                  double tol, double nll_tol = 1e-6);

/// Midpoint convexity of the 1D director functional
///   I(phi) = integral of  k/2 theta'(s)^2 / phi'(s) + lambda (1-cos theta(s)) phi'(s)
/// along pointwise-averaged derivative segments between sampled 1D flows.
TestReport test_theta_convexity(double k, double lambda, double length, int pairs,
                                std::uint64_t seed, double tol);

/// The integrand of the 1D functional above, integrated from node samples.
double theta_energy(double k, double lambda, const BoxDomain& dom1d,
                    const std::vector<double>& theta_at_nodes,
                    const std::vector<double>& theta_prime_at_nodes,
                    const std::vector<double>& phi_prime_at_nodes);

/// ---- identity checks ---------------------------------------------------
///
/// These store worst_margin = -(largest absolute deviation), so the shared
/// rule "fail iff worst_margin < -tol" applies unchanged.

/// Two-sided exactness: | integral W(F J) - |domain| W(F) | and the J F
/// variant must both vanish for every jet and flow.
TestReport test_null_lagrangian(const EnergyDensity& w, const BoxDomain& dom,
                                const std::vector<Mat>& jets, const FlowEnsemble& ens,
                                double tol);

/// Exactness of W = log chi for a multiplicative character chi, along flows
/// of the character's own group; jets must be members.
TestReport test_character_nll(const CharacterSpec& chi, const BoxDomain& dom,
                              const std::vector<Mat>& jets, const FlowEnsemble& ens,
                              double tol);

/// Change-of-variables identity: integral over E of W(grad phi(x) F) equals
/// det F times the integral over F^-1 E of W(F grad psi(y)), psi = F^-1 phi F.
/// The two sides are quadratures at different resolutions, so agreement is a
/// genuine numerical check, not an algebraic tautology.
TestReport test_conjugation_identity(const EnergyDensity& w, const GroupSpec& flow_group,
                                     const Box& box, int pairs, std::uint64_t seed, double tol);

/// First variation of I(u) under inner composition u . phi_tau, computed two
/// ways: symmetric differencing of I at tau = +-h, and the direct integral
/// -(integral of r . (grad u) eta) with r from the strong-form operator.
/// Both must vanish for null lagrangians (any u) and for affine u (any W).
TestReport test_first_variation(const EnergyDensity& w, const DeformationMap& u,
                                const VectorField& eta, const BoxDomain& dom, double h,
                                double tol);

/// L2 norm of r_i(x) = H_ijkl(grad u) d2u_k/dx_l dx_j, the strong-form
/// equilibrium operator applied to u.
TestReport test_equilibrium_residual(const EnergyDensity& w, const DeformationMap& u,
                                     const BoxDomain& dom, double tol);

/// Exponentials of sampled tangent matrices and gradients of sampled flows
/// must satisfy the group's defining constraint.  Worst jet deviation wins.
TestReport test_exp_invariance(const GroupSpec& g, const BoxDomain& dom, int jet_count,
                               int flow_count, std::uint64_t seed, double tol);

/// ---- pointwise second-order checks -------------------------------------

enum class LeghMode { Inequality, Identity };

/// Integrated second variation along flow directions at jet F:
///   Q(eta) = H_ijmr(F) F_ik F_mp * Gram[(k,j),(p,r)],
/// Gram being the L2 Gram matrix of the sampled field's gradient components.
/// Inequality mode demands Q >= -tol (after normalizing by trace Gram and
/// the size of H); Identity mode demands |Q| <= tol.
TestReport test_legh(const EnergyDensity& w, const Mat& F, const BoxDomain& dom, int count,
                     std::uint64_t seed, LeghMode mode, double tol);

/// Row-major n^2 x n^2 matrix  Gram[(k,j),(p,r)] = integral of
/// d eta_k/dx_j * d eta_p/dx_r;  positive semidefinite by construction.
std::vector<double> gradient_gram(const VectorField& eta, const BoxDomain& dom);

enum class LhPairs { AllPairs, OrthogonalPairs };

/// Pointwise rank-one form q(a,b) = H_ijkl(F) (Fa)_i b_j (Fa)_k b_l over
/// unit pairs, minimized by dense sampling plus shrinking pattern descent.
/// worst_margin is the raw minimum (no normalization), so it can be compared
/// against closed-form oracles.
TestReport test_lh_pointwise(const EnergyDensity& w, const Mat& F, LhPairs pairs, int count,
                             std::uint64_t seed, double tol);

/// Largest violation of the pairing antisymmetry H_ijkl = -H_ilkj that
/// characterizes second derivatives of null lagrangians.
TestReport test_parhl(const EnergyDensity& w, const Mat& F, double tol);

/// ---- diagnostics -------------------------------------------------------

/// Margins of one fixed perturbation replayed at shrinking support scales
/// (same gradient magnitudes, support volume * scale^n): the sign pattern of
/// a quasiconvexity margin must survive concentration.
std::vector<double> semicontinuity_margins(const EnergyDensity& w, const Mat& F,
                                           const BoxDomain& dom, std::uint64_t seed,
                                           const std::vector<double>& scales);

} // namespace varinv
