#pragma once

#include <cstdlib>
#include <exception>
#include <vector>

#include <omp.h>

namespace topobias {

// Worker count: explicit request > TOPOBIAS_THREADS > OpenMP default.
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("TOPOBIAS_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return omp_get_max_threads();
}

// Parallel loop over independent output slots. Each iteration must write only
// to state owned by index i, so results are identical for any worker count.
// Exceptions are captured per slot and the lowest-index one is rethrown.
template <typename Body>
void parallel_for_indexed(std::size_t count, int threads, Body&& body) {
    std::vector<std::exception_ptr> errors(count);
    const int workers = resolve_threads(threads);
#pragma omp parallel for schedule(dynamic) num_threads(workers)
    for (long long i = 0; i < static_cast<long long>(count); ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace topobias
