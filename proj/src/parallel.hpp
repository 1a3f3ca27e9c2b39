// Copyright 2026 The SCT Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SCT_SRC_PARALLEL_HPP
#define SCT_SRC_PARALLEL_HPP

#include <cstddef>
#include <exception>
#include <vector>

namespace sct::detail {

/// fn(i) for i in [0, n) across the OpenMP team, one index per task.
/// Exceptions cannot cross the region boundary, so each is parked in its
/// slot and the one from the lowest index is rethrown afterwards.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace sct::detail

#endif  // SCT_SRC_PARALLEL_HPP
