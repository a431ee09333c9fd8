#pragma once

#include <cstddef>
#include <functional>

namespace deltametry::detail {

/// Worker count: DELTAMETRY_THREADS if set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
std::size_t thread_count();

/// Calls body(i) for every i in [0, n). Each index is visited exactly once;
/// callers must only write state owned by that index.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace deltametry::detail
