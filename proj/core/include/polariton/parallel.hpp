#pragma once

#include <cstdint>
#include <functional>

namespace polariton {

/// Thread cap from POLARITON_ECHO_THREADS (0 means uncapped).
int env_thread_cap();

/// Number of worker threads to use: hardware concurrency, clamped by the
/// environment cap and by `requested` when positive.
int effective_threads(int requested);

/// Runs fn(i) for i in [0, n). Work items must write only to their own slots;
/// scheduling order is unspecified, results must not depend on it.
void parallel_for(std::int64_t n, int max_threads, const std::function<void(std::int64_t)>& fn);

}  // namespace polariton
