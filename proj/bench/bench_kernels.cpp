// Times the OpenMP row-parallel interaction kernels against the plain
// single-threaded reference implementations on identical inputs, and reports
// the largest disagreement seen. Build with -DCMAKE_BUILD_TYPE=Release and
// set OMP_NUM_THREADS (or --threads) to vary the worker count.

#include "curvegas/configuration.hpp"
#include "curvegas/coulomb.hpp"
#include "curvegas/curve.hpp"
#include "curvegas/rng.hpp"
#include "curvegas/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using curvegas::ArcLengthCurve;
using curvegas::Configuration;

using Clock = std::chrono::steady_clock;

template <class F>
double time_ms(F&& f, int repeats) {
    // One warm-up call, then the best of `repeats` timed calls.
    f();
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = Clock::now();
        f();
        const auto t1 = Clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

Configuration random_configuration(std::size_t n, double l, std::uint64_t seed) {
    curvegas::StreamRng rng(seed, 42);
    const double spacing = l / static_cast<double>(n);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = spacing * (static_cast<double>(i) + 0.5 + 0.3 * rng.uniform(-1.0, 1.0));
    }
    return curvegas::quotient_map(x, l);
}

} // namespace

int main(int argc, char** argv) {
    int threads = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--threads" && i + 1 < argc) {
            threads = std::atoi(argv[++i]);
        }
    }
    curvegas::apply_thread_setting(threads);

#ifdef _OPENMP
    std::printf("openmp: yes, max threads %d\n", omp_get_max_threads());
#else
    std::printf("openmp: no (serial build)\n");
#endif

    const ArcLengthCurve curve =
        curvegas::build_arclength_curve(curvegas::CurveSpec::ellipse(2.0, 1.0));

    std::printf("%-18s %6s %12s %12s %8s %10s\n", "kernel", "n", "parallel_ms",
                "serial_ms", "speedup", "max_diff");

    double worst = 0.0;
    for (const std::size_t n : {64u, 256u, 1024u}) {
        const Configuration c = random_configuration(n, curve.length(), 7u);
        const int repeats = n >= 1024 ? 5 : 20;

        {
            volatile double sink = 0.0;
            const double tp = time_ms([&] { sink = curvegas::energy(curve, c); }, repeats);
            const double e_par = curvegas::energy(curve, c);
            const double e_ser = curvegas::reference::energy(curve, c);
            const double ts =
                time_ms([&] { sink = curvegas::reference::energy(curve, c); }, repeats);
            const double diff = std::fabs(e_par - e_ser);
            worst = std::max(worst, diff);
            std::printf("%-18s %6zu %12.3f %12.3f %8.2f %10.2e\n", "energy", n, tp, ts,
                        ts / tp, diff);
            (void)sink;
        }
        {
            std::vector<double> gp, gs;
            const double tp =
                time_ms([&] { gp = curvegas::energy_gradient(curve, c); }, repeats);
            const double ts = time_ms(
                [&] { gs = curvegas::reference::energy_gradient(curve, c); }, repeats);
            double diff = 0.0;
            for (std::size_t i = 0; i < gp.size(); ++i) {
                diff = std::max(diff, std::fabs(gp[i] - gs[i]));
            }
            worst = std::max(worst, diff);
            std::printf("%-18s %6zu %12.3f %12.3f %8.2f %10.2e\n", "energy_gradient", n,
                        tp, ts, ts / tp, diff);
        }
        {
            volatile double sink = 0.0;
            const double tp =
                time_ms([&] { sink = curvegas::log_discriminant(curve, c); }, repeats);
            const double lp = curvegas::log_discriminant(curve, c);
            const double ls = curvegas::reference::log_discriminant(curve, c);
            const double ts = time_ms(
                [&] { sink = curvegas::reference::log_discriminant(curve, c); }, repeats);
            const double diff = std::fabs(lp - ls);
            worst = std::max(worst, diff);
            std::printf("%-18s %6zu %12.3f %12.3f %8.2f %10.2e\n", "log_discriminant", n,
                        tp, ts, ts / tp, diff);
            (void)sink;
        }
    }

    std::printf("largest parallel/serial disagreement: %.3e\n", worst);
    return worst < 1e-10 ? 0 : 1;
}
