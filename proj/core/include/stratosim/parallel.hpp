#pragma once

#include <cstddef>
#include <functional>

namespace stratosim {

/// Process-wide worker cap. Resolution order: explicit set_thread_cap() value,
/// then the STRATOSIM_THREADS environment variable, then hardware concurrency.
void set_thread_cap(unsigned n);
unsigned thread_cap();

/// Runs fn(i) for i in [0, count) on up to `threads` workers (0 = thread_cap()).
/// Work is split into fixed contiguous chunks, so any per-index output is
/// written to a distinct slot and results never depend on the worker count.
/// Exceptions from workers are rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                  unsigned threads = 0);

}  // namespace stratosim
