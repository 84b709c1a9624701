#pragma once

#include <functional>

namespace dglod {

// Runs task(i) for i in [0, count) on up to `threads` workers. Tasks must
// write only to their own output slots. If any task throws, the exception
// of the lowest failing index is rethrown after all workers finish.
void parallel_for(int count, int threads, const std::function<void(int)>& task);

// Worker count to use for a requested value (<= 0 means all hardware
// threads).
int resolve_threads(int requested);

}  // namespace dglod
