#include "qsim/worker_pool.hpp"

#include <algorithm>

namespace qsim {

namespace {
thread_local bool t_inside_task = false;
}

WorkerPool::WorkerPool(std::size_t workers) : workers_(std::max<std::size_t>(1, workers)) {
  // The calling thread participates, so spawn workers - 1 helpers.
  for (std::size_t i = 1; i < workers_; ++i) threads_.emplace_back([this] { worker_loop(); });
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard lock(mutex_);
    stop_ = true;
  }
  wake_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerPool::drain() {
  const bool was_inside = t_inside_task;
  t_inside_task = true;
  for (;;) {
    std::size_t index;
    {
      std::lock_guard lock(mutex_);
      if (next_ >= job_count_) break;
      index = next_++;
    }
    try {
      (*job_)(index);
    } catch (...) {
      std::lock_guard lock(mutex_);
      if (!error_) error_ = std::current_exception();
    }
    std::lock_guard lock(mutex_);
    if (++finished_ == job_count_) done_.notify_all();
  }
  t_inside_task = was_inside;
}

void WorkerPool::worker_loop() {
  std::size_t seen = 0;
  for (;;) {
    {
      std::unique_lock lock(mutex_);
      wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      ++active_;
    }
    drain();
    {
      std::lock_guard lock(mutex_);
      --active_;
    }
    done_.notify_all();
  }
}

void WorkerPool::run(std::size_t count, const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  if (threads_.empty() || t_inside_task || count == 1) {
    const bool was_inside = t_inside_task;
    t_inside_task = true;
    try {
      for (std::size_t i = 0; i < count; ++i) fn(i);
    } catch (...) {
      t_inside_task = was_inside;
      throw;
    }
    t_inside_task = was_inside;
    return;
  }
  {
    std::unique_lock lock(mutex_);
    // A previous job's helpers may still be leaving drain().
    done_.wait(lock, [&] { return active_ == 0; });
    job_ = &fn;
    job_count_ = count;
    next_ = 0;
    finished_ = 0;
    error_ = nullptr;
    ++generation_;
  }
  wake_.notify_all();
  drain();
  std::exception_ptr error;
  {
    std::unique_lock lock(mutex_);
    done_.wait(lock, [&] { return finished_ == job_count_; });
    job_count_ = 0;
    error = error_;
  }
  if (error) std::rethrow_exception(error);
}

void WorkerPool::parallel_for(std::size_t total, std::size_t grain,
                              const std::function<void(std::size_t, std::size_t)>& fn) {
  if (total == 0) return;
  grain = std::max<std::size_t>(1, grain);
  const std::size_t chunks = (total + grain - 1) / grain;
  run(chunks, [&](std::size_t c) {
    const std::size_t begin = c * grain;
    fn(begin, std::min(total, begin + grain));
  });
}

}  // namespace qsim
