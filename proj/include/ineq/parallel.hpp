#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ineq {

// Thread control for the OpenMP kernels. 0 = library default.
void set_threads(int n);
int max_threads();

// Data-parallel map over [0, n). Every iteration must write only to its own
// output slot; the result is then independent of scheduling and thread count.
// `force_serial` runs the plain loop and is the reference path used by tests
// and the benchmark to check the parallel kernels.
template <class F>
void parallel_for(std::ptrdiff_t n, F&& body, bool force_serial = false) {
    if (force_serial) {
        for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
#else
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
#endif
}

} // namespace ineq
