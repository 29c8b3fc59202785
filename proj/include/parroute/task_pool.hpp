#pragma once

#include <condition_variable>
#include <deque>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace parroute {

class TaskGroup;

/// Fixed-size worker pool. A pool of concurrency N starts N - 1 workers; the
/// thread that waits on a TaskGroup supplies the last one.
class TaskPool {
public:
    explicit TaskPool(int concurrency);
    ~TaskPool();

    TaskPool(const TaskPool &) = delete;
    TaskPool &operator=(const TaskPool &) = delete;

    int concurrency() const { return static_cast<int>(workers_.size()) + 1; }

private:
    friend class TaskGroup;

    struct Task {
        TaskGroup *group;
        std::function<void()> fn;
    };

    void worker_loop();
    void execute(Task &task);

    std::mutex mutex_;
    std::condition_variable cv_;
    std::deque<Task> queue_;
    bool stopping_ = false;
    std::vector<std::thread> workers_;
};

/// A set of tasks that can be waited on as a unit. Tasks may add more tasks
/// to the group they run in. wait() never sleeps while one of the group's
/// own tasks is still queued: it runs it instead, so nested groups cannot
/// starve a fixed-size pool.
class TaskGroup {
public:
    explicit TaskGroup(TaskPool &pool) : pool_(pool) {}
    ~TaskGroup();

    TaskGroup(const TaskGroup &) = delete;
    TaskGroup &operator=(const TaskGroup &) = delete;

    void run(std::function<void()> fn);

    /// Returns once every task in the group, including tasks added while
    /// waiting, has finished. Rethrows the first exception a task raised.
    void wait();

    TaskPool &pool() { return pool_; }

private:
    friend class TaskPool;

    TaskPool &pool_;
    int pending_ = 0; // guarded by pool_.mutex_
    std::exception_ptr error_;
};

} // namespace parroute
