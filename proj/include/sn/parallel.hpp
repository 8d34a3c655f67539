#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace sn {

// Serial is the reference path; Parallel distributes independent work items
// over OpenMP threads. Both produce identical per-item results.
enum class Execution { Serial, Parallel };

int max_threads();

namespace detail {
void run_parallel(std::ptrdiff_t count, void (*thunk)(void*, std::ptrdiff_t), void* ctx,
                  std::vector<std::exception_ptr>& errors);
}

// Calls body(i) for i in [0, count). Exceptions thrown by any item are
// collected and the one with the lowest index is rethrown after the loop.
template <class Body>
void for_each_index(Execution exec, std::size_t count, Body&& body) {
  if (exec == Execution::Serial || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  auto thunk = [](void* ctx, std::ptrdiff_t i) {
    (*static_cast<Body*>(ctx))(static_cast<std::size_t>(i));
  };
  detail::run_parallel(static_cast<std::ptrdiff_t>(count), thunk, &body, errors);
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace sn
