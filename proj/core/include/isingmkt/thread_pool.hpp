#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace isingmkt {

/// Fixed-size worker pool with a blocking parallel-for.
///
/// Work is split into contiguous index blocks, so the assignment of
/// indices to threads never affects what each index computes. A pool of
/// size 1 runs everything on the calling thread.
class ThreadPool {
public:
  explicit ThreadPool(std::size_t threads = 1);
  ~ThreadPool();

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  std::size_t size() const noexcept { return workers_.size() + 1; }

  /// Calls fn(i) for every i in [0, n); returns once all calls finished.
  /// The first exception thrown by any call is rethrown here.
  void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

  static std::size_t hardware_threads() noexcept;

private:
  void worker_loop(std::size_t id);
  void run_block(std::size_t block);

  std::vector<std::thread> workers_;
  std::mutex mutex_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const std::function<void(std::size_t)>* job_ = nullptr;
  std::size_t job_n_ = 0;
  std::size_t generation_ = 0;
  std::size_t pending_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
};

}  // namespace isingmkt
