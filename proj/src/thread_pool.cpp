#include "kernbench/thread_pool.hpp"

#include <algorithm>
#include <exception>
#include <memory>

namespace kernbench {

ThreadPool::ThreadPool(std::size_t workers) {
    workers = std::max<std::size_t>(1, workers);
    workers_.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) workers_.emplace_back([this] { worker_loop(); });
}

ThreadPool::~ThreadPool() {
    {
        std::lock_guard lock(mutex_);
        stopping_ = true;
    }
    cv_.notify_all();
    for (auto& w : workers_) w.join();
}

void ThreadPool::worker_loop() {
    for (;;) {
        std::function<void()> task;
        {
            std::unique_lock lock(mutex_);
            cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
            if (queue_.empty()) return;
            task = std::move(queue_.front());
            queue_.pop_front();
        }
        task();
    }
}

void ThreadPool::run_all(std::vector<std::function<void()>> tasks) {
    struct Join {
        std::mutex m;
        std::condition_variable cv;
        std::size_t remaining;
        std::exception_ptr error;
    };
    auto join = std::make_shared<Join>();
    join->remaining = tasks.size();
    if (tasks.empty()) return;
    {
        std::lock_guard lock(mutex_);
        for (auto& t : tasks) {
            queue_.emplace_back([join, t = std::move(t)] {
                std::exception_ptr err;
                try {
                    t();
                } catch (...) {
                    err = std::current_exception();
                }
                std::lock_guard lk(join->m);
                if (err && !join->error) join->error = err;
                if (--join->remaining == 0) join->cv.notify_all();
            });
        }
    }
    cv_.notify_all();
    std::unique_lock lk(join->m);
    join->cv.wait(lk, [&] { return join->remaining == 0; });
    if (join->error) std::rethrow_exception(join->error);
}

}  // namespace kernbench
