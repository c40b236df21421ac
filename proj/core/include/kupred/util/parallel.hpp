#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace kupred {

// Thread count used by parallel_for. 0 = hardware concurrency.
// Overridable via the KUPRED_THREADS environment variable.
inline unsigned effective_thread_count(unsigned requested = 0) {
    if (const char* env = std::getenv("KUPRED_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    if (requested > 0) return requested;
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? hc : 1;
}

// Runs body(i) for i in [0, n). Each index writes only to its own output
// slot, so the result is independent of the thread count and schedule.
inline void parallel_for(size_t n, const std::function<void(size_t)>& body,
                         unsigned threads = 0) {
    if (n == 0) return;
    unsigned t = effective_thread_count(threads);
    if (t <= 1 || n == 1) {
        for (size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= n || failed.load()) return;
            try {
                body(i);
            } catch (...) {
                if (!failed.exchange(true)) err = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    unsigned spawn = static_cast<unsigned>(std::min<size_t>(t, n));
    pool.reserve(spawn);
    for (unsigned i = 0; i < spawn; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failed.load() && err) std::rethrow_exception(err);
}

} // namespace kupred
