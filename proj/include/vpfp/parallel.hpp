#pragma once

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace vpfp {

/// Selects the kernel driver. `serial` is the plain reference loop kept for
/// testing and benchmarking; `parallel` distributes independent slices over
/// OpenMP threads. Both produce bit-identical results.
enum class Exec { serial, parallel };

inline int max_threads()
{
#if defined(_OPENMP)
    return ::omp_get_max_threads();
#else
    return 1;
#endif
}

inline int thread_id()
{
#if defined(_OPENMP)
    return ::omp_get_thread_num();
#else
    return 0;
#endif
}

}  // namespace vpfp
