// Benchmark of the geometry kernels: serial reference vs the OpenMP path.
// The branch trace itself is sequential (each point seeds the next); the
// data-parallel work lives in the profile post-processing measured here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "cmc/branch_io.hpp"
#include "cmc/profile_geometry.hpp"
#include "cmc/shooting.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace cmc;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
}

template <typename F>
double best_of(int reps, const F& f) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, ms_since(t0));
    }
    return best;
}

void report(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-28s serial %9.2f ms   parallel %9.2f ms   speedup %.2fx\n",
                name, serial_ms, parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP disabled; both columns run the serial path\n");
#endif

    const ModelParams params{1, 1, 0.0};

    // Real profiles: one embedded and one with loops.
    const ShootingPoint Z4 = preset_point("Z4");
    const ShootingPoint Z4c = refine_fixed_H(params, Z4.H, Z4.a, Z4.T);
    const ClosedProfile prof4 = extend_periodic(shoot(params, Z4c).trajectory, 4000);

    const ShootingPoint Z6 = preset_point("Z6");
    const ShootingPoint Z6c = refine_fixed_H(params, Z6.H, Z6.a, Z6.T);
    const ClosedProfile prof6 = extend_periodic(shoot(params, Z6c).trajectory, 4000);

    std::printf("\nself-intersection scan, N = %zu segments\n",
                prof4.points.size() - 1);
    report("embedded profile, crossings",
           best_of(3, [&] { is_embedded(prof4, 1e-9, Execution::Serial, false); }),
           best_of(3, [&] { is_embedded(prof4, 1e-9, Execution::Parallel, false); }));
    report("embedded profile, +distance",
           best_of(3, [&] { is_embedded(prof4, 1e-9, Execution::Serial, true); }),
           best_of(3, [&] { is_embedded(prof4, 1e-9, Execution::Parallel, true); }));
    report("looped profile, crossings",
           best_of(3, [&] { is_embedded(prof6, 1e-9, Execution::Serial, false); }),
           best_of(3, [&] { is_embedded(prof6, 1e-9, Execution::Parallel, false); }));

    std::printf("\nhausdorff distance, %zu x %zu points\n", prof4.points.size(),
                prof6.points.size());
    report("profile vs profile",
           best_of(3, [&] { hausdorff(prof4.points, prof6.points, Execution::Serial); }),
           best_of(3, [&] { hausdorff(prof4.points, prof6.points, Execution::Parallel); }));

    std::printf("\nimmersion sampling, %zu x 32 x 32 grid\n", prof4.points.size());
    report("sample_immersion",
           best_of(3, [&] { sample_immersion(prof4.points, 32, 32, Execution::Serial); }),
           best_of(3, [&] { sample_immersion(prof4.points, 32, 32, Execution::Parallel); }));

    // Cross-check: identical results from both paths.
    const auto rs = is_embedded(prof6, 1e-9, Execution::Serial, true);
    const auto rp = is_embedded(prof6, 1e-9, Execution::Parallel, true);
    const bool same = rs.embedded == rp.embedded &&
                      rs.crossings.size() == rp.crossings.size() &&
                      rs.min_self_distance == rp.min_self_distance;
    std::printf("\nserial/parallel reports identical: %s\n", same ? "yes" : "NO");
    return same ? 0 : 1;
}
