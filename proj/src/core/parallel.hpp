#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace pirm {

/**
 * Fixed set of worker threads that run the iterations of a loop body
 * concurrently and join before returning. With one thread everything runs
 * inline on the caller.
 *
 * Exceptions thrown by the body are collected per index; after the join the
 * one with the smallest index is rethrown.
 */
class WorkerPool {
public:
  explicit WorkerPool(int threads = 1);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  int threads() const noexcept { return static_cast<int>(workers_.size()) + 1; }

  void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

private:
  void worker_loop();
  void drain(std::unique_lock<std::mutex>& lock);

  std::vector<std::thread> workers_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(std::size_t)>* body_ = nullptr;
  std::vector<std::exception_ptr> errors_;
  std::size_t count_ = 0;
  std::size_t next_ = 0;
  std::size_t finished_ = 0;
  unsigned long generation_ = 0;
  bool stop_ = false;
};

} // namespace pirm
