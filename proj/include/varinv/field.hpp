#pragma once
#include <string>
#include <vector>

#include "varinv/bump.hpp"
#include "varinv/group.hpp"
#include "varinv/quadrature.hpp"

#include "json.hpp"

namespace varinv {

/// Smooth generator fields for the flows.  Every constructed field carries
/// the box it was declared on, and its support must sit strictly inside that
/// box (for Shear fields the constraint applies to the driven coordinate
/// only; the displacement a shear produces is constant across the other
/// axes, so the flow still fixes the relevant box faces).
enum class FieldKind {
    GenericBump,   // one bump sum per component; generally not divergence-free
    DivFree2D,     // rotated gradient of a scalar bump stream function
    DivFree3D,     // curl of a bump vector potential
    Hamiltonian2D, // same construction as DivFree2D, tagged as symplectic generator
    Shear,         // component p driven by a 1D bump in coordinate q
    Separable1D,   // scalar bump on an interval
    LinearTest,    // eta(x) = A x; integrator oracle only, no compact support
};

class VectorField {
public:
    static VectorField generic_bump(const Box& domain,
                                    std::vector<std::vector<BumpProfile>> component_bumps);
    static VectorField div_free_2d(const Box& domain, BumpProfile stream);
    static VectorField div_free_3d(const Box& domain, std::array<BumpProfile, 3> potential);
    static VectorField hamiltonian_2d(const Box& domain, BumpProfile stream);
    /// eta_p(x) = b(x_q) with a 1D bump b; p, q 0-based and distinct.
    static VectorField shear(const Box& domain, int p, int q, BumpProfile profile_1d);
    static VectorField separable_1d(const Box& domain, BumpProfile profile);
    static VectorField linear_test(const Box& domain, Mat a);

    int dim() const { return domain_.dim(); }
    FieldKind kind() const { return kind_; }
    const Box& domain() const { return domain_; }

    Vec value(const Vec& x) const;
    Mat gradient(const Vec& x) const;
    /// True inside the (closed) support; outside, value and gradient are
    /// exactly zero.
    bool in_support(const Vec& x) const;

    /// Parameter dump for witnesses and reports.
    nlohmann::json params() const;

    /// Bump lists of a GenericBump field (empty for the other kinds); used
    /// by the witness refiner, which resamples perturbed copies.
    const std::vector<std::vector<BumpProfile>>& component_bumps() const { return comp_; }

private:
    VectorField() = default;
    FieldKind kind_ = FieldKind::GenericBump;
    Box domain_;
    std::vector<std::vector<BumpProfile>> comp_;   // GenericBump
    BumpProfile stream_;                           // DivFree2D / Hamiltonian2D / Separable1D / Shear
    std::array<BumpProfile, 3> pot_;               // DivFree3D
    int p_ = 0, q_ = 1;                            // Shear
    Mat a_;                                        // LinearTest
};

/// Tangency of a field to a group: the pointwise linear condition the
/// gradient must satisfy for the induced flow to stay in the group
/// (trace-free for volume preservation, Hamiltonian symmetry for Sp,
/// off-pattern zero for shears; no condition for FullDiff / Separable1D).
/// Returns the worst deviation over the grid nodes and the witness node.
struct TangencyCheck {
    bool ok = false;
    double worst = 0.0;
    Vec witness;
};

TangencyCheck field_in_tangent_group(const VectorField& f, const GroupSpec& g,
                                     const BoxDomain& grid);

} // namespace varinv
