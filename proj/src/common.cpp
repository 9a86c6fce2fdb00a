#include "autolabel/common.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace autolabel {

void set_worker_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

int worker_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace autolabel
