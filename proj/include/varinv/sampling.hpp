#pragma once
#include <cstdint>
#include <vector>

#include "varinv/energy.hpp"
#include "varinv/flow.hpp"
#include "varinv/quadrature.hpp"
#include "varinv/rng.hpp"

namespace varinv {

/// Random compactly supported field tangent to the group, support strictly
/// inside the box.  Amplitudes are scaled by the bump radius (to the power
/// matching how many derivatives the construction takes) so the resulting
/// gradient magnitudes land in a moderate band regardless of support size.
VectorField sample_admissible_field(const GroupSpec& g, const Box& domain, SplitMix64& rng);

/// Ensemble of flow maps of sampled admissible fields.  |tau| is uniform in
/// [tau_lo, tau_hi] with random sign; flow k depends only on (seed, k), so a
/// longer ensemble extends a shorter one with the same seed.
std::vector<FlowMap> sample_flows(const GroupSpec& g, const Box& domain, int count,
                                  std::uint64_t seed, double tau_lo, double tau_hi,
                                  int steps_per_unit = 1000);

/// {identity if requested} + random well-conditioned group jets; jet k
/// depends only on (seed, k).
std::vector<Mat> sample_jets(const GroupSpec& g, int count, std::uint64_t seed,
                             bool include_identity = true);

/// A flow (or any map) evaluated once per quadrature node.  Integrating a
/// flow is the expensive step; tabulating lets one ensemble be reused across
/// every (density, jet) pair that integrates over the same domain.
struct FlowTable {
    std::vector<Vec> y;
    std::vector<Mat> jac;
};

FlowTable tabulate(const PointMap& phi, const BoxDomain& dom);

/// Flows plus their tables over one domain, built once and shared by all
/// the invariance checks that run against the same group.
struct FlowEnsemble {
    std::vector<FlowMap> flows;
    std::vector<FlowTable> tables;
};

FlowEnsemble make_flow_ensemble(const GroupSpec& g, const BoxDomain& dom, int count,
                                std::uint64_t seed, double tau_lo, double tau_hi,
                                int steps_per_unit = 1000);

/// Which side the jet multiplies the flow gradient on.
enum class Side { Left, Right };

/// Integral of W(F * J(x)) (Left) or W(J(x) * F) (Right) over the domain,
/// J taken from the table.  Requires a homogeneous density.
double flow_energy(const EnergyDensity& w, const Mat& F, const FlowTable& t,
                   const BoxDomain& dom, Side side);

/// Integral of W(F + grad eta(x)) over the domain: the additive perturbation
/// form used for plain quasiconvexity.  Requires a homogeneous density.
double field_energy(const EnergyDensity& w, const Mat& F, const VectorField& eta,
                    const BoxDomain& dom);

/// (value - volume * base) / (volume * (1 + |base|)): the per-unit-volume
/// excess energy, made scale-free in the size of W.
double normalized_margin(double integral_value, double base_value, double volume);

} // namespace varinv
