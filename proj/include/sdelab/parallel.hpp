#pragma once

#include <cstddef>
#include <exception>
#include <limits>
#include <vector>

#include <omp.h>

namespace sdelab {

/// How a batch of independent work items is executed. `workers` caps the
/// OpenMP team (0 = runtime default). Results never depend on either field.
struct Execution {
    int workers = 0;
    bool serial = false;

    static Execution reference() { return {1, true}; }
};

namespace reference {

/// Plain loop; the baseline the OpenMP kernel is tested against.
template <class T, class Fn>
std::vector<T> map_indices(std::size_t n, Fn&& fn)
{
    std::vector<T> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
}

}  // namespace reference

/// out[i] = fn(i) across an OpenMP team. Each slot is written by exactly one
/// iteration, so the output is identical for any team size. If items throw,
/// the exception from the lowest index is rethrown after the loop.
template <class T, class Fn>
std::vector<T> parallel_map_indices(std::size_t n, int workers, Fn&& fn)
{
    std::vector<T> out(n);
    std::exception_ptr failure;
    std::size_t failure_index = std::numeric_limits<std::size_t>::max();
    const int threads = workers > 0 ? workers : omp_get_max_threads();
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 8) num_threads(threads)
    for (long long i = 0; i < count; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(sdelab_parallel_failure)
            {
                if (static_cast<std::size_t>(i) < failure_index) {
                    failure_index = static_cast<std::size_t>(i);
                    failure = std::current_exception();
                }
            }
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

template <class T, class Fn>
std::vector<T> map_indices(std::size_t n, const Execution& exec, Fn&& fn)
{
    if (exec.serial) return reference::map_indices<T>(n, fn);
    return parallel_map_indices<T>(n, exec.workers, fn);
}

}  // namespace sdelab
