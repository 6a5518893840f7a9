#include "ggen/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace ggen {

namespace {
int g_threads = 0;
}

void set_num_threads(int n) { g_threads = n; }

int num_threads() {
    if (g_threads > 0) return g_threads;
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

void parallel_chunks(int n_items, int n_chunks,
                     const std::function<void(int, int, int)>& fn) {
    if (n_items <= 0) return;
    n_chunks = std::min(n_chunks, n_items);
    auto chunk_range = [&](int c) {
        int begin = static_cast<int>(static_cast<long long>(c) * n_items / n_chunks);
        int end = static_cast<int>(static_cast<long long>(c + 1) * n_items / n_chunks);
        return std::pair<int, int>(begin, end);
    };

    int workers = std::min(num_threads(), n_chunks);
    if (workers <= 1) {
        for (int c = 0; c < n_chunks; ++c) {
            auto [b, e] = chunk_range(c);
            fn(c, b, e);
        }
        return;
    }

    std::atomic<int> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (;;) {
            int c = next.fetch_add(1);
            if (c >= n_chunks || failed.load()) return;
            auto [b, e] = chunk_range(c);
            try {
                fn(c, b, e);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int i = 1; i < workers; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failed.load() && error) std::rethrow_exception(error);
}

}  // namespace ggen
