#include "varinv/sampling.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "varinv/parallel.hpp"

namespace varinv {

namespace {

// Peak derivative factors of the radial bump (1-s)^10, s = |x-c|^2/R^2:
// max |grad| ~ 2.8 A / R and max |hess| ~ 20 A / R^2.  Used to back out the
// amplitude that yields a requested field-gradient magnitude.
constexpr double kGradPeak = 2.8;
constexpr double kHessPeak = 20.0;

double min_extent(const Box& box) {
    double m = box.extent(0);
    for (int i = 1; i < box.dim(); ++i) m = std::min(m, box.extent(i));
    return m;
}

// Center at least 31% of the extent away from every face, radius under 29%
// of the smallest extent: support strictly interior by construction.  The
// radius window is deliberately wide-only; bumps much narrower than a
// quadrature cell would dominate every integral check with grid error.
BumpProfile sample_bump(const Box& box, SplitMix64& rng, double amplitude) {
    const int n = box.dim();
    Vec c(n);
    for (int i = 0; i < n; ++i) {
        const double ext = box.extent(i);
        c[i] = rng.uniform(box.lo[i] + 0.31 * ext, box.hi[i] - 0.31 * ext);
    }
    const double r = rng.uniform(0.21, 0.29) * min_extent(box);
    return BumpProfile(c, r, amplitude);
}

// 1D bump along one axis of an nD box (for shear profiles).
BumpProfile sample_axis_bump(const Box& box, int axis, SplitMix64& rng, double amplitude) {
    const double ext = box.extent(axis);
    Vec c(1);
    c[0] = rng.uniform(box.lo[axis] + 0.31 * ext, box.hi[axis] - 0.31 * ext);
    const double r = rng.uniform(0.21, 0.29) * ext;
    return BumpProfile(c, r, amplitude);
}

double signed_target(SplitMix64& rng) {
    const double mag = rng.uniform(0.2, 0.7);
    return rng.uniform() < 0.5 ? -mag : mag;
}

} // namespace

VectorField sample_admissible_field(const GroupSpec& g, const Box& domain, SplitMix64& rng) {
    const int n = g.n;
    if (domain.dim() != n) throw std::invalid_argument("sampling: box dimension mismatch");
    switch (g.kind) {
        case GroupKind::FullDiff: {
            std::vector<std::vector<BumpProfile>> comp(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                const int nb = 1 + static_cast<int>(rng.uniform_int(0, 1));
                for (int b = 0; b < nb; ++b) {
                    BumpProfile p = sample_bump(domain, rng, 0.0);
                    p.amplitude = signed_target(rng) * p.radius / kGradPeak;
                    comp[static_cast<std::size_t>(i)].push_back(p);
                }
            }
            return VectorField::generic_bump(domain, std::move(comp));
        }
        case GroupKind::VolumePreserving: {
            if (n == 2) {
                BumpProfile s = sample_bump(domain, rng, 0.0);
                s.amplitude = signed_target(rng) * s.radius * s.radius / kHessPeak;
                return VectorField::div_free_2d(domain, s);
            }
            std::array<BumpProfile, 3> pot;
            for (auto& p : pot) {
                p = sample_bump(domain, rng, 0.0);
                p.amplitude = signed_target(rng) * p.radius * p.radius / (3.0 * kHessPeak);
            }
            return VectorField::div_free_3d(domain, pot);
        }
        case GroupKind::Symplectic2D: {
            BumpProfile s = sample_bump(domain, rng, 0.0);
            s.amplitude = signed_target(rng) * s.radius * s.radius / kHessPeak;
            return VectorField::hamiltonian_2d(domain, s);
        }
        case GroupKind::Shear: {
            BumpProfile p = sample_axis_bump(domain, g.q, rng, 0.0);
            p.amplitude = signed_target(rng) * p.radius / kGradPeak;
            return VectorField::shear(domain, g.p, g.q, p);
        }
        case GroupKind::Separable1D: {
            BumpProfile p = sample_axis_bump(domain, 0, rng, 0.0);
            p.amplitude = signed_target(rng) * p.radius / kGradPeak;
            return VectorField::separable_1d(domain, p);
        }
    }
    throw std::logic_error("sampling: unhandled group kind");
}

std::vector<FlowMap> sample_flows(const GroupSpec& g, const Box& domain, int count,
                                  std::uint64_t seed, double tau_lo, double tau_hi,
                                  int steps_per_unit) {
    if (count < 0) throw std::invalid_argument("sampling: negative flow count");
    if (!(tau_lo >= 0.0) || !(tau_hi >= tau_lo))
        throw std::invalid_argument("sampling: need 0 <= tau_lo <= tau_hi");
    std::vector<FlowMap> flows;
    flows.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        SplitMix64 rng(substream(seed, static_cast<std::uint64_t>(k)));
        VectorField f = sample_admissible_field(g, domain, rng);
        double tau = rng.uniform(tau_lo, tau_hi);
        if (rng.uniform() < 0.5) tau = -tau;
        flows.emplace_back(std::move(f), tau, default_flow_steps(tau, steps_per_unit));
    }
    return flows;
}

std::vector<Mat> sample_jets(const GroupSpec& g, int count, std::uint64_t seed,
                             bool include_identity) {
    std::vector<Mat> jets;
    if (include_identity) jets.push_back(Mat::identity(g.n));
    for (int k = 0; k < count; ++k)
        jets.push_back(random_jet_element(g, substream(seed, static_cast<std::uint64_t>(k))));
    return jets;
}

FlowTable tabulate(const PointMap& phi, const BoxDomain& dom) {
    if (phi.dim() != dom.dim()) throw std::invalid_argument("tabulate: dimension mismatch");
    const auto& nodes = dom.nodes();
    FlowTable t;
    t.y.assign(nodes.size(), Vec(dom.dim()));
    t.jac.assign(nodes.size(), Mat::zero(dom.dim()));
    std::vector<std::string> errs(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t k) {
        try {
            const MapEval e = phi.eval(nodes[k]);
            t.y[k] = e.y;
            t.jac[k] = e.grad;
        } catch (const std::exception& ex) {
            errs[k] = ex.what();
        }
    });
    for (const auto& e : errs)
        if (!e.empty()) throw std::runtime_error("tabulate: map evaluation failed: " + e);
    return t;
}

FlowEnsemble make_flow_ensemble(const GroupSpec& g, const BoxDomain& dom, int count,
                                std::uint64_t seed, double tau_lo, double tau_hi,
                                int steps_per_unit) {
    FlowEnsemble ens;
    ens.flows = sample_flows(g, dom.box(), count, seed, tau_lo, tau_hi, steps_per_unit);
    ens.tables.reserve(ens.flows.size());
    for (const FlowMap& f : ens.flows) ens.tables.push_back(tabulate(f, dom));
    return ens;
}

namespace {

double weighted_sum(const EnergyDensity& w, const BoxDomain& dom,
                    const std::function<Mat(std::size_t)>& gradient_at) {
    if (!w.homogeneous())
        throw std::invalid_argument("energy sum: density must depend on the gradient only");
    const auto& nodes = dom.nodes();
    const auto& weights = dom.weights();
    std::vector<double> vals(nodes.size(), 0.0);
    std::vector<std::string> errs(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t k) {
        try {
            vals[k] = w.value(gradient_at(k));
        } catch (const std::exception& ex) {
            errs[k] = ex.what();
        }
    });
    double s = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        if (!errs[k].empty())
            throw std::runtime_error("energy sum: density evaluation failed at a node: " +
                                     errs[k]);
        if (!std::isfinite(vals[k]))
            throw std::runtime_error("energy sum: non-finite density value at a node");
        s += weights[k] * vals[k];
    }
    return s;
}

} // namespace

double flow_energy(const EnergyDensity& w, const Mat& F, const FlowTable& t,
                   const BoxDomain& dom, Side side) {
    if (t.jac.size() != dom.nodes().size())
        throw std::invalid_argument("flow energy: table does not match the domain");
    return weighted_sum(w, dom, [&](std::size_t k) {
        return side == Side::Left ? F * t.jac[k] : t.jac[k] * F;
    });
}

double field_energy(const EnergyDensity& w, const Mat& F, const VectorField& eta,
                    const BoxDomain& dom) {
    if (eta.dim() != dom.dim()) throw std::invalid_argument("field energy: dimension mismatch");
    return weighted_sum(w, dom, [&](std::size_t k) {
        return F + eta.gradient(dom.nodes()[k]);
    });
}

double normalized_margin(double integral_value, double base_value, double volume) {
    return (integral_value - volume * base_value) / (volume * (1.0 + std::fabs(base_value)));
}

} // namespace varinv
