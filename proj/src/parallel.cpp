#include "shapebias/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace shapebias {

namespace {

std::atomic<int>& worker_setting()
{
    static std::atomic<int> workers{std::max(1, static_cast<int>(std::thread::hardware_concurrency()))};
    return workers;
}

}  // namespace

int worker_count() { return worker_setting().load(); }

void set_worker_count(int workers) { worker_setting().store(std::max(1, workers)); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body)
{
    const auto workers = static_cast<std::size_t>(worker_count());
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }

    const std::size_t chunk = std::max<std::size_t>(1, n / (workers * 8));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto run = [&] {
        for (;;) {
            const std::size_t begin = next.fetch_add(chunk);
            if (begin >= n) return;
            const std::size_t end = std::min(n, begin + chunk);
            try {
                for (std::size_t i = begin; i < end; ++i) body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(n);
                return;
            }
        }
    };

    std::vector<std::jthread> pool;
    const std::size_t spawned = std::min(workers, n) - 1;
    pool.reserve(spawned);
    for (std::size_t t = 0; t < spawned; ++t) pool.emplace_back(run);
    run();
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace shapebias
