#pragma once

#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace curvegas {

inline int max_threads() noexcept {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_threads(int n) noexcept {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

// Sum of term(i) for i in [0, n) with a thread-count-independent result:
// fixed-size blocks are accumulated serially, block partials are combined in
// index order. Only the block loop is parallel, so rerunning with a different
// number of threads reproduces the same floating-point value bit for bit.
template <class Term>
double blocked_sum(std::size_t n, Term&& term, std::size_t block = 1024) {
    if (n == 0) return 0.0;
    const std::size_t nblocks = (n + block - 1) / block;
    std::vector<double> partial(nblocks, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (nblocks > 1)
#endif
    for (long long bi = 0; bi < static_cast<long long>(nblocks); ++bi) {
        const std::size_t lo = static_cast<std::size_t>(bi) * block;
        const std::size_t hi = lo + block < n ? lo + block : n;
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) acc += term(i);
        partial[static_cast<std::size_t>(bi)] = acc;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

} // namespace curvegas
