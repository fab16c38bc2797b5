#pragma once

#include <cstddef>
#include <functional>

namespace gbafs {

/// Upper bound on worker threads used by parallel loops. 0 means hardware
/// concurrency. Set once by the CLI or bindings before running work.
void set_max_threads(unsigned threads);
unsigned max_threads();

/// Calls body(i) for i in [0, n). Iterations must write to disjoint outputs;
/// results then do not depend on the thread count or schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace gbafs
