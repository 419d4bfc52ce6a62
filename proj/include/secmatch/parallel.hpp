#pragma once

// Trial loops. Every Monte Carlo kernel in the library is written against
// these two drivers: the serial loop is the reference, the OpenMP loop must
// produce bit-identical results because each trial derives its own streams
// and writes only to its own output slot.

#include <cstddef>
#include <exception>
#include <string>

#include "secmatch/errors.hpp"

#if defined(SECMATCH_HAVE_OPENMP)
#include <omp.h>
#endif

namespace secmatch {

enum class Execution { serial, parallel };

inline int worker_threads() {
#if defined(SECMATCH_HAVE_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace detail {

inline std::string describe(const std::exception_ptr& ep) {
    try {
        std::rethrow_exception(ep);
    } catch (const std::exception& e) {
        return e.what();
    } catch (...) {
        return "unknown error";
    }
}

}  // namespace detail

template <class Fn>
void for_each_trial_serial(std::size_t trials, Fn&& fn) {
    for (std::size_t i = 0; i < trials; ++i) {
        try {
            fn(i);
        } catch (const TrialError&) {
            throw;
        } catch (...) {
            throw TrialError(i, detail::describe(std::current_exception()));
        }
    }
}

/// OpenMP driver. The lowest failing trial index is reported, matching what
/// the serial loop would have thrown.
template <class Fn>
void for_each_trial_parallel(std::size_t trials, Fn&& fn) {
#if defined(SECMATCH_HAVE_OPENMP)
    std::exception_ptr first_error;
    std::size_t first_index = trials;
    const long long count = static_cast<long long>(trials);
#pragma omp parallel for schedule(dynamic, 16)
    for (long long i = 0; i < count; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(secmatch_trial_error)
            {
                if (static_cast<std::size_t>(i) < first_index) {
                    first_index = static_cast<std::size_t>(i);
                    first_error = std::current_exception();
                }
            }
        }
    }
    if (first_error) throw TrialError(first_index, detail::describe(first_error));
#else
    for_each_trial_serial(trials, std::forward<Fn>(fn));
#endif
}

template <class Fn>
void for_each_trial(Execution exec, std::size_t trials, Fn&& fn) {
    if (exec == Execution::serial)
        for_each_trial_serial(trials, std::forward<Fn>(fn));
    else
        for_each_trial_parallel(trials, std::forward<Fn>(fn));
}

}  // namespace secmatch
