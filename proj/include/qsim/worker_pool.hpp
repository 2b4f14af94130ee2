#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace qsim {

/// Fixed set of worker threads. Each parallel call blocks until every task has
/// finished, so consecutive calls are separated by a barrier.
class WorkerPool {
 public:
  explicit WorkerPool(std::size_t workers = 1);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  std::size_t size() const noexcept { return workers_; }

  /// Runs fn(i) for i in [0, count). Tasks are claimed dynamically; callers
  /// must write only to task-owned memory. Called from inside a task, runs inline.
  void run(std::size_t count, const std::function<void(std::size_t)>& fn);

  /// Splits [0, total) into ranges of `grain` and runs fn(begin, end) per range.
  void parallel_for(std::size_t total, std::size_t grain,
                    const std::function<void(std::size_t, std::size_t)>& fn);

 private:
  void worker_loop();
  void drain();

  std::size_t workers_;
  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(std::size_t)>* job_ = nullptr;
  std::size_t job_count_ = 0;
  std::size_t next_ = 0;
  std::size_t finished_ = 0;
  std::size_t generation_ = 0;
  std::size_t active_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
};

}  // namespace qsim
