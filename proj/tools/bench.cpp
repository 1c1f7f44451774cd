// Benchmark: the OpenMP sweep/scan lanes against their serial reference.
//
// The per-point kernels (variational monodromy of a tiny dense system, Robin
// Newton iterations) are sequential by nature; the parallel win comes from the
// embarrassingly parallel outer loops over the r grid and the seed grid.

#include "vortexstab/continuation.hpp"
#include "vortexstab/robin.hpp"

#include <chrono>
#include <cstdio>
#include <string>

#ifdef VORTEXSTAB_HAVE_OPENMP
#include <omp.h>
#endif

using namespace vortexstab;

namespace {

double time_ms(const std::function<void()>& fn, int repeats) {
    double best = 1e300;
    for (int k = 0; k < repeats; ++k) {
        auto t0 = std::chrono::steady_clock::now();
        fn();
        auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void row(const char* name, double serial_ms, double parallel_ms, int jobs) {
    std::printf("%-34s %10.1f ms %12.1f ms (x%d) %8.2fx\n", name, serial_ms, parallel_ms, jobs,
                serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
    int jobs = 4;
#ifdef VORTEXSTAB_HAVE_OPENMP
    jobs = std::min(8, omp_get_max_threads());
#endif
    if (argc > 1) jobs = std::max(1, std::atoi(argv[1]));

    std::printf("vortexstab benchmark: serial reference vs OpenMP lanes (jobs = %d)\n\n", jobs);

    // continuation sweep over a dense r grid (triangle: 6 + 36 = 42 ODE dims)
    {
        std::vector<double> grid;
        for (double r = 0.02; r <= 0.2001; r += 0.01) grid.push_back(r);
        auto run = [&](int j) {
            ContinuationOptions opts;
            opts.jobs = j;
            FamilyResult fam = continue_family(std::make_shared<UnitDisc>(),
                                               make_equilateral_triangle(1.0, 2.0, 3.0), grid,
                                               opts);
            if (fam.points.size() != grid.size()) std::abort();
        };
        double s = time_ms([&] { run(1); }, 3);
        double p = time_ms([&] { run(jobs); }, 3);
        row("triangle sweep, 19 grid points", s, p, jobs);
    }

    // the same for the pair in the saddle landscape
    {
        Mat2 sdl;
        sdl << 1.0, 0.0, 0.0, -1.0;
        std::vector<double> grid;
        for (double r = 0.02; r <= 0.2001; r += 0.005) grid.push_back(r);
        auto run = [&](int j) {
            ContinuationOptions opts;
            opts.jobs = j;
            FamilyResult fam = continue_family(std::make_shared<SyntheticQuadratic>(sdl),
                                               make_vortex_pair(1.0, 1.0, 1.0), grid, opts);
            if (fam.points.size() != grid.size()) std::abort();
        };
        double s = time_ms([&] { run(1); }, 3);
        double p = time_ms([&] { run(jobs); }, 3);
        row("saddle pair sweep, 37 grid points", s, p, jobs);
    }

    // Robin critical-point scan over a dense seed grid
    {
        ConformalImage dom(std::vector<Complex>{1.0, 0.08, Complex(0.0, 0.05)});
        std::vector<Vec2> seeds = default_seed_grid(dom, 21);
        auto run = [&](int j) {
            RobinSearchOptions opts;
            opts.jobs = j;
            RobinSearchResult res = find_critical_points(dom, seeds, opts);
            if (res.points.empty()) std::abort();
        };
        double s = time_ms([&] { run(1); }, 3);
        double p = time_ms([&] { run(jobs); }, 3);
        std::string name = "robin scan, " + std::to_string(seeds.size()) + " seeds";
        row(name.c_str(), s, p, jobs);
    }

    return 0;
}
