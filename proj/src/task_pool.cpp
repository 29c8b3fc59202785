#include "parroute/task_pool.hpp"

#include <algorithm>
#include <iterator>
#include <utility>

#include "parroute/error.hpp"

namespace parroute {

TaskPool::TaskPool(int concurrency)
{
    if (concurrency < 1)
        throw InvalidParameter("task pool concurrency must be at least 1");
    const int workers = concurrency - 1;
    workers_.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i)
        workers_.emplace_back([this] { worker_loop(); });
}

TaskPool::~TaskPool()
{
    {
        std::lock_guard lock(mutex_);
        stopping_ = true;
    }
    cv_.notify_all();
    for (auto &t : workers_)
        t.join();
}

void TaskPool::execute(Task &task)
{
    std::exception_ptr error;
    try {
        task.fn();
    } catch (...) {
        error = std::current_exception();
    }
    task.fn = nullptr;
    bool done = false;
    {
        std::lock_guard lock(mutex_);
        if (error && !task.group->error_)
            task.group->error_ = error;
        done = --task.group->pending_ == 0;
    }
    if (done)
        cv_.notify_all();
}

void TaskPool::worker_loop()
{
    std::unique_lock lock(mutex_);
    for (;;) {
        cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
        if (queue_.empty())
            return;
        Task task = std::move(queue_.front());
        queue_.pop_front();
        lock.unlock();
        execute(task);
        lock.lock();
    }
}

TaskGroup::~TaskGroup()
{
    try {
        wait();
    } catch (...) {
    }
}

void TaskGroup::run(std::function<void()> fn)
{
    {
        std::lock_guard lock(pool_.mutex_);
        ++pending_;
        pool_.queue_.push_back({this, std::move(fn)});
    }
    pool_.cv_.notify_all();
}

void TaskGroup::wait()
{
    std::unique_lock lock(pool_.mutex_);
    while (pending_ > 0) {
        auto &q = pool_.queue_;
        auto it = std::find_if(q.rbegin(), q.rend(), [this](const TaskPool::Task &t) { return t.group == this; });
        if (it == q.rend()) {
            pool_.cv_.wait(lock);
            continue;
        }
        TaskPool::Task task = std::move(*it);
        q.erase(std::next(it).base());
        lock.unlock();
        pool_.execute(task);
        lock.lock();
    }
    if (error_) {
        auto error = std::exchange(error_, nullptr);
        std::rethrow_exception(error);
    }
}

} // namespace parroute
