#pragma once

#include <cstddef>
#include <functional>

namespace hylo {

/// Thread cap: HYLOMORPH_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
std::size_t max_threads();

/// Runs body(i) for i in [0, count) on up to max_threads() threads. Callers
/// write results into per-index slots so reductions stay in input order.
/// The exception from the lowest failing index is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace hylo
