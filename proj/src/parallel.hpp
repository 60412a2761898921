#pragma once

#include <cstddef>

namespace stereo {

// Process-wide worker cap for parallel_for. 1 means fully serial.
// Results must not depend on this setting: parallel_for only ever hands
// out disjoint index ranges, so any kernel that writes disjoint data per
// index is bitwise reproducible at every thread count.
void set_max_threads(int n);
int max_threads();
int hardware_threads();

namespace detail {
void parallel_for_impl(std::size_t n, void (*fn)(std::size_t, void*), void* ctx);
}

// Calls body(i) for i in [0, n), possibly from several threads.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  auto trampoline = [](std::size_t i, void* ctx) { (*static_cast<Body*>(ctx))(i); };
  detail::parallel_for_impl(n, trampoline, &body);
}

}  // namespace stereo
