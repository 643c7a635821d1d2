#pragma once

#include <functional>

namespace maxstab {

/// Clamps a requested worker count to something sane; <= 0 means use the
/// hardware concurrency.
int resolve_threads(int requested);

/// Runs fn(chunk) for every chunk in [0, n_chunks) on up to n_threads
/// workers. Callers combine per-chunk results in chunk order, which keeps
/// every reduction bit-identical for any thread count.
void run_chunks(int n_chunks, int n_threads, const std::function<void(int)>& fn);

}  // namespace maxstab
