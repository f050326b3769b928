#pragma once

#include <cstddef>
#include <functional>

namespace shapebias {

// Number of worker threads used by parallel loops. Defaults to the hardware concurrency.
// Results of every library routine are independent of this value.
int worker_count();
void set_worker_count(int workers);

// Runs body(i) for i in [0, n). Work is split into contiguous chunks; the first
// exception thrown by any worker is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace shapebias
