#include "dotshape/threading.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>
#include <vector>

namespace dotshape {

namespace {
int g_threads = 1;
}

void set_thread_count(int n) {
    if (n < 1)
        throw std::invalid_argument("thread count must be >= 1");
    g_threads = n;
}

int thread_count() { return g_threads; }

void parallel_for(int n, const std::function<void(int, int)>& fn) {
    if (n <= 0)
        return;
    const int workers = std::min(g_threads, n);
    if (workers == 1) {
        fn(0, n);
        return;
    }
    const int chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int t = 1; t < workers; ++t) {
        const int b = t * chunk;
        const int e = std::min(n, b + chunk);
        if (b >= e)
            break;
        pool.emplace_back(fn, b, e);
    }
    fn(0, std::min(n, chunk));
    for (auto& th : pool)
        th.join();
}

} // namespace dotshape
