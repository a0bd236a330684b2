#include "medsplat/parallel.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace medsplat {

int effective_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_blocks(int n_blocks, int threads, const std::function<void(int)>& fn) {
    if (n_blocks <= 0) return;
    const int workers = std::min(effective_threads(threads), n_blocks);
    if (workers <= 1) {
        for (int b = 0; b < n_blocks; ++b) fn(b);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const int b = next.fetch_add(1, std::memory_order_relaxed);
                if (b >= n_blocks) break;
                fn(b);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace medsplat
