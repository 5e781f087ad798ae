#pragma once
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace glai {

// Worker count: hardware concurrency, capped by the GLAI_THREADS env var.
inline std::size_t max_threads() {
    std::size_t n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("GLAI_THREADS")) {
        char* end = nullptr;
        unsigned long cap = std::strtoul(env, &end, 10);
        if (end != env && cap >= 1 && cap < n) n = cap;
    }
    return n;
}

// Runs f(i) for i in [0, n). Each index writes only its own output slot, so
// the result is identical for any thread count.
template <typename F>
void parallel_for(std::size_t n, F&& f) {
    std::size_t threads = std::min(max_threads(), n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
        std::size_t lo = t * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &f] {
            for (std::size_t i = lo; i < hi; ++i) f(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace glai
