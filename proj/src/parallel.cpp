#include "resmpc/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

namespace resmpc {

namespace {

std::atomic<int> g_override{0};
thread_local bool t_inside_worker = false;

int auto_worker_count() {
    if (const char* env = std::getenv("REPO_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
}

}  // namespace

int worker_count() {
    const int n = g_override.load(std::memory_order_relaxed);
    return n > 0 ? n : auto_worker_count();
}

void set_worker_count(int n) {
    g_override.store(n, std::memory_order_relaxed);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    const int workers = worker_count();
    if (workers <= 1 || n == 1 || t_inside_worker) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::map<std::size_t, std::exception_ptr> errors;

    auto body = [&] {
        t_inside_worker = true;
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n) break;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(err_mutex);
                errors.emplace(i, std::current_exception());
            }
        }
        t_inside_worker = false;
    };

    const std::size_t spawn = std::min<std::size_t>(std::size_t(workers), n);
    std::vector<std::thread> threads;
    threads.reserve(spawn - 1);
    for (std::size_t i = 1; i < spawn; ++i) threads.emplace_back(body);
    body();
    for (auto& t : threads) t.join();

    if (!errors.empty()) std::rethrow_exception(errors.begin()->second);
}

}  // namespace resmpc
