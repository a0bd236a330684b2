#pragma once

#include <functional>

namespace medsplat {

// Resolve a requested worker count; 0 means hardware concurrency.
int effective_threads(int requested);

// Run fn(block) for block in [0, n_blocks). Blocks are claimed dynamically but
// each block executes on exactly one worker, so per-block state stays ordered.
// Callers that need bit-identical reductions across worker counts must keep the
// block decomposition itself independent of the worker count.
void parallel_blocks(int n_blocks, int threads, const std::function<void(int)>& fn);

}  // namespace medsplat
