#include "sn/parallel.hpp"

#include <omp.h>

namespace sn {

int max_threads() { return omp_get_max_threads(); }

namespace detail {

void run_parallel(std::ptrdiff_t count, void (*thunk)(void*, std::ptrdiff_t), void* ctx,
                  std::vector<std::exception_ptr>& errors) {
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      thunk(ctx, i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
}

}  // namespace detail
}  // namespace sn
