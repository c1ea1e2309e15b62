#include "varinv/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace varinv {

ExecMode& exec_mode() {
#ifdef _OPENMP
    static ExecMode mode = ExecMode::Parallel;
#else
    static ExecMode mode = ExecMode::Serial;
#endif
    return mode;
}

bool openmp_enabled() {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
#ifdef _OPENMP
    if (exec_mode() == ExecMode::Parallel) {
        const long n = static_cast<long>(count);
#pragma omp parallel for schedule(static)
        for (long i = 0; i < n; ++i) {
            body(static_cast<std::size_t>(i));
        }
        return;
    }
#endif
    for (std::size_t i = 0; i < count; ++i) {
        body(i);
    }
}

} // namespace varinv
