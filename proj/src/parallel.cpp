#include "packbench/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace packbench {

int resolve_threads(int requested) {
    int n = requested > 0 ? requested : static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
    if (const char* cap = std::getenv("PACKBENCH_THREADS")) {
        try {
            const int limit = std::stoi(cap);
            if (limit > 0) n = std::min(n, limit);
        } catch (const std::exception&) {
            // ignore malformed values
        }
    }
    return std::max(1, n);
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    const int workers = std::min(resolve_threads(threads), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                const std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers - 1));
    for (int t = 1; t < workers; ++t) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace packbench
