#ifndef SLSPEC_EXEC_UTIL_HPP
#define SLSPEC_EXEC_UTIL_HPP

#include <exception>

#include "slspec/types.hpp"

namespace slspec::detail {

/// Runs body(i) for i in [0, n). The parallel path keeps per-item work
/// identical to the serial one, so results match bit for bit; exceptions
/// are captured and rethrown after the loop.
template <class F>
void parallel_for(long n, Exec exec, F&& body) {
    if (exec == Exec::serial) {
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        try {
            body(i);
        } catch (...) {
#pragma omp critical
            {
                if (!err) err = std::current_exception();
            }
        }
    }
    if (err) std::rethrow_exception(err);
}

}  // namespace slspec::detail

#endif
