#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace rbfmol {

/// Runs f(i) for i in [0, count) on up to `jobs` threads; jobs <= 1 runs inline.
template <class F>
void parallel_for(long count, int jobs, F&& f) {
    if (jobs <= 1 || count <= 1) {
        for (long i = 0; i < count; ++i) f(i);
        return;
    }
    std::atomic<long> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        while (!failed.load()) {
            const long i = next.fetch_add(1);
            if (i >= count) break;
            try {
                f(i);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const int t = static_cast<int>(std::min<long>(jobs, count));
    for (int k = 0; k < t; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace rbfmol
