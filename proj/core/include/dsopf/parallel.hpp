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

#ifndef DSOPF_PARALLEL_HPP
#define DSOPF_PARALLEL_HPP

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace dsopf {

/// Fixed set of persistent workers executing statically partitioned ranges.
/// Work item k of n always lands in the same block for a given worker
/// count, and the calling thread runs block 0.
class WorkerPool {
 public:
  using Task = std::function<void(std::size_t begin, std::size_t end, std::size_t worker)>;

  /// `workers` = 0 selects std::thread::hardware_concurrency().
  explicit WorkerPool(std::size_t workers = 1);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  std::size_t size() const { return count_; }

  /// Runs `task` over [0, n) and blocks until every block finished. The
  /// exception of the lowest-numbered failing block is rethrown.
  void run(std::size_t n, const Task& task);

 private:
  void loop(std::size_t worker);
  void execute(std::size_t worker);

  std::size_t count_ = 1;
  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const Task* task_ = nullptr;
  std::size_t n_ = 0;
  std::size_t generation_ = 0;
  std::size_t pending_ = 0;
  bool stop_ = false;
  std::vector<std::exception_ptr> errors_;
};

}  // namespace dsopf

#endif  // DSOPF_PARALLEL_HPP
