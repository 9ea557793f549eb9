// Timings of the OpenMP kernels against their serial reference implementations.
//
// Usage: bench_kernels [n] [levels] [trials]

#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dtnlab/commutator.hpp"
#include "dtnlab/measures.hpp"

using namespace dtnlab;

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

template <typename F>
double time_ms(F&& fn, int reps = 3) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        double t0 = now_ms();
        fn();
        best = std::min(best, now_ms() - t0);
    }
    return best;
}

void row(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-28s %10.2f ms %10.2f ms %8.2fx\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
    const int n = argc > 1 ? std::atoi(argv[1]) : 512;
    const int levels = argc > 2 ? std::atoi(argv[2]) : 512;
    const int trials = argc > 3 ? std::atoi(argv[3]) : 64;

#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (compiled without OpenMP)\n");
#endif
    std::printf("n = %d, levels = %d, trials = %d\n\n", n, levels, trials);
    std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    BoundaryGrid grid(n, 2.0 * kPi);
    GradedGrid gg = make_graded_grid(grid, levels);
    TentFamily tents = make_tents(grid);
    auto f = random_f2(grid, n / 8, 7, 0);
    StreamSolution sol(f);

    volatile double sink = 0.0;

    row("weighted_volume_norm",
        time_ms([&] { sink = reference::graded_integral(gg, grad_u_sq_sampler(sol), 1); }),
        time_ms([&] { sink = graded_integral(gg, grad_u_sq_sampler(sol), 1); }));

    row("nontangential_max",
        time_ms([&] { sink = reference::nontangential_max(gg, u_abs_sampler(sol), 2.0)[0]; }),
        time_ms([&] { sink = nontangential_max(gg, u_abs_sampler(sol), 2.0)[0]; }));

    auto density = [&](double y) {
        auto s = q_sq_sampler(sol)(y);
        for (double& v : s) v *= y;
        return s;
    };
    row("carleson_norm",
        time_ms([&] { sink = reference::carleson_norm(gg, tents, density).norm; }),
        time_ms([&] { sink = carleson_norm(gg, tents, density).norm; }));

    SweepConfig cfg{7, trials, n / 8, n, 2.0 * kPi, 2.0};
    row("ensemble_sweep", time_ms([&] { sink = reference::ensemble_sweep(cfg).max_ratio; }, 1),
        time_ms([&] { sink = ensemble_sweep(cfg).max_ratio; }, 1));

    (void)sink;
    return 0;
}
