#include "parallel.hpp"

#include "errors.hpp"

namespace pirm {

WorkerPool::WorkerPool(int threads) {
  if (threads < 1) throw ContractViolation("thread count must be >= 1");
  for (int t = 1; t < threads; ++t) workers_.emplace_back([this] { worker_loop(); });
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    stop_ = true;
  }
  wake_.notify_all();
  for (auto& w : workers_) w.join();
}

// Claims indices until none are left; the lock is released around each body call.
void WorkerPool::drain(std::unique_lock<std::mutex>& lock) {
  while (next_ < count_) {
    const std::size_t i = next_++;
    lock.unlock();
    std::exception_ptr err;
    try {
      (*body_)(i);
    } catch (...) {
      err = std::current_exception();
    }
    lock.lock();
    errors_[i] = err;
    if (++finished_ == count_) done_.notify_all();
  }
}

void WorkerPool::worker_loop() {
  unsigned long seen = 0;
  std::unique_lock<std::mutex> lock(mutex_);
  for (;;) {
    wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
    if (stop_) return;
    seen = generation_;
    drain(lock);
  }
}

void WorkerPool::parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  if (workers_.empty() || count == 1) {
    std::exception_ptr first;
    for (std::size_t i = 0; i < count; ++i) {
      try {
        body(i);
      } catch (...) {
        if (!first) first = std::current_exception();
      }
    }
    if (first) std::rethrow_exception(first);
    return;
  }
  std::unique_lock<std::mutex> lock(mutex_);
  body_ = &body;
  errors_.assign(count, nullptr);
  count_ = count;
  next_ = 0;
  finished_ = 0;
  ++generation_;
  wake_.notify_all();
  drain(lock);
  done_.wait(lock, [&] { return finished_ == count_; });
  body_ = nullptr;
  count_ = 0;
  for (auto& e : errors_) {
    if (e) std::rethrow_exception(e);
  }
}

} // namespace pirm
