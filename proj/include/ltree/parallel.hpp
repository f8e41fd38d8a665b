#pragma once

#include <exception>
#include <mutex>

#include <omp.h>

namespace ltree {

/// Runs fn(i) for i in [0, count). jobs <= 1 is the serial reference path;
/// otherwise iterations are spread over an OpenMP team of `jobs` threads.
/// fn must write only to per-index state. The first exception thrown by any
/// iteration is rethrown after the loop.
template <class Fn>
void parallel_for(int count, int jobs, Fn&& fn) {
    if (jobs <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (int i = 0; i < count; ++i) {
        try {
            fn(i);
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

/// Worker count used when the caller passes jobs == 0.
inline int default_jobs() { return omp_get_max_threads(); }

} // namespace ltree
