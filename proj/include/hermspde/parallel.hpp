#pragma once

#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hermspde {

/// Worker cap from HERMSPDE_THREADS (0 or unset = hardware concurrency).
inline int worker_count() {
    if (const char* env = std::getenv("HERMSPDE_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Evaluates fn(stream) for stream = 0..count-1 across workers, returning
/// results indexed by stream so reductions see ascending stream order no
/// matter how work was scheduled.
template <typename T, typename Fn>
std::vector<T> map_streams(int count, Fn&& fn) {
    std::vector<T> results(count);
    const int workers = std::min(worker_count(), count > 0 ? count : 1);
    if (workers <= 1) {
        for (int s = 0; s < count; ++s) results[s] = fn(static_cast<std::uint64_t>(s));
        return results;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr error;
    std::mutex error_mtx;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (int s = w; s < count; s += workers)
                    results[s] = fn(static_cast<std::uint64_t>(s));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mtx);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return results;
}

}  // namespace hermspde
