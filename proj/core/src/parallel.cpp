/*
 Copyright 2026 The dsopf Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "dsopf/parallel.hpp"

#include <algorithm>

namespace dsopf {

WorkerPool::WorkerPool(std::size_t workers) {
  count_ = workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : workers;
  errors_.resize(count_);
  threads_.reserve(count_ - 1);
  for (std::size_t w = 1; w < count_; ++w) threads_.emplace_back([this, w] { loop(w); });
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    stop_ = true;
  }
  start_cv_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerPool::execute(std::size_t worker) {
  const std::size_t begin = n_ * worker / count_;
  const std::size_t end = n_ * (worker + 1) / count_;
  try {
    if (begin < end) (*task_)(begin, end, worker);
  } catch (...) {
    errors_[worker] = std::current_exception();
  }
}

void WorkerPool::loop(std::size_t worker) {
  std::size_t seen = 0;
  for (;;) {
    {
      std::unique_lock<std::mutex> lock(mutex_);
      start_cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
    }
    execute(worker);
    {
      std::lock_guard<std::mutex> lock(mutex_);
      if (--pending_ == 0) done_cv_.notify_one();
    }
  }
}

void WorkerPool::run(std::size_t n, const Task& task) {
  std::fill(errors_.begin(), errors_.end(), nullptr);
  task_ = &task;
  n_ = n;
  if (count_ > 1) {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      pending_ = count_ - 1;
      ++generation_;
    }
    start_cv_.notify_all();
  }
  execute(0);
  if (count_ > 1) {
    std::unique_lock<std::mutex> lock(mutex_);
    done_cv_.wait(lock, [&] { return pending_ == 0; });
  }
  task_ = nullptr;
  for (auto& e : errors_)
    if (e) std::rethrow_exception(e);
}

}  // namespace dsopf
