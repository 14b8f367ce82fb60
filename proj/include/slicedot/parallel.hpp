#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace slicedot {

// Runs fn(i) for i in [0, count) over `workers` threads in contiguous
// chunks. Each index is processed exactly once and results must be
// written to per-index slots, so the outcome does not depend on the
// worker count. Exceptions are captured and rethrown on the caller.
template <class Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
    if (workers < 1) workers = 1;
    const std::size_t nworkers =
        std::min<std::size_t>(static_cast<std::size_t>(workers), count == 0 ? 1 : count);
    if (nworkers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    threads.reserve(nworkers);
    const std::size_t chunk = (count + nworkers - 1) / nworkers;
    for (std::size_t w = 0; w < nworkers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        threads.emplace_back([&, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace slicedot
