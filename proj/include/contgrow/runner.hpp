#pragma once

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace contgrow {

/// Run fn(0..replicas-1) with up to `parallelism` worker threads. Results
/// are stored by replica index, so emitted statistics never depend on the
/// schedule; exceptions are rethrown after all workers join.
template <typename T, typename Fn>
std::vector<T> parallel_replicas(long replicas, int parallelism, Fn&& fn) {
    std::vector<T> out(static_cast<std::size_t>(replicas));
    if (parallelism <= 1) {
        for (long i = 0; i < replicas; ++i) out[static_cast<std::size_t>(i)] = fn(i);
        return out;
    }
    std::atomic<long> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const long i = next.fetch_add(1);
            if (i >= replicas) return;
            try {
                out[static_cast<std::size_t>(i)] = fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    const int nthreads = std::min<long>(parallelism, replicas);
    threads.reserve(static_cast<std::size_t>(nthreads));
    for (int i = 0; i < nthreads; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
    return out;
}

}  // namespace contgrow
