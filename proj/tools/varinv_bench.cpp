// Times the OpenMP kernels against the serial reference on three hot paths:
// quadrature sweeps, flow tabulation, and Monte-Carlo image-volume counting.
#include <chrono>
#include <cstdio>
#include <functional>

#include "varinv/boundary.hpp"
#include "varinv/energy.hpp"
#include "varinv/parallel.hpp"
#include "varinv/sampling.hpp"

using namespace varinv;

namespace {

double time_of(const std::function<void()>& work, int reps) {
    // One warm-up pass, then best-of-reps wall time.
    work();
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        work();
        const double dt =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (dt < best) best = dt;
    }
    return best;
}

void row(const char* name, const std::function<void()>& work, int reps) {
    exec_mode() = ExecMode::Serial;
    const double serial = time_of(work, reps);
    double parallel = serial;
    if (openmp_enabled()) {
        exec_mode() = ExecMode::Parallel;
        parallel = time_of(work, reps);
    }
    std::printf("%-28s %10.4f ms %10.4f ms %8.2fx\n", name, serial * 1e3, parallel * 1e3,
                serial / parallel);
}

} // namespace

int main() {
    if (openmp_enabled())
        std::printf("OpenMP, %d thread(s)\n", max_threads());
    else
        std::printf("built without OpenMP: both columns run the serial reference\n");
    std::printf("kernel                            serial      parallel   speedup\n");

    const int n = 2;
    const BoxDomain dom(Box::unit_cube(n), 24, 6);
    const EnergyDensity w = catalog_get("stvk", {{"lambda", 1.0}, {"mu", 1.0}}, n);
    SplitMix64 rng(7);
    const VectorField eta = sample_admissible_field(GroupSpec::full_diff(n), dom.box(), rng);
    const FlowMap phi(eta, 0.3, default_flow_steps(0.3));
    const DeformationMap u = DeformationMap::affine_bump(
        Vec::zero(n), Mat::identity(n),
        {{0, BumpProfile(Vec{0.5, 0.5}, 0.25, 0.05)}});

    row("integrate W(grad u)", [&] { (void)functional_eval(w, u, dom); }, 5);
    row("tabulate flow jets", [&] { (void)tabulate(phi, dom); }, 5);
    row("image volume MC (4e5)", [&] { (void)image_volume_mc(u, dom, 400000, 11); }, 5);

    return 0;
}
