#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace regsum::detail {

/* Run fn(block_index, lo, hi) over [lo, hi] split into fixed-size blocks.
 * Block boundaries are independent of thread count, so any per-block results
 * merged in block order are deterministic. */
template <class Fn>
void parallel_blocks(uint64_t lo, uint64_t hi, int threads, uint64_t block, Fn fn) {
    if (hi < lo) return;
    uint64_t nblocks = (hi - lo) / block + 1;
    int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(
                                                          std::min<uint64_t>(nblocks, 256))));
    if (nthreads == 1) {
        for (uint64_t b = 0; b < nblocks; ++b)
            fn(b, lo + b * block, std::min(hi, lo + (b + 1) * block - 1));
        return;
    }
    std::atomic<uint64_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                uint64_t b = next.fetch_add(1);
                if (b >= nblocks) return;
                fn(b, lo + b * block, std::min(hi, lo + (b + 1) * block - 1));
            }
        });
    for (auto& th : pool) th.join();
}

}  // namespace regsum::detail
