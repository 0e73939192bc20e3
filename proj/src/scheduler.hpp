/* Copyright 2026 the kprio authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef KPRIO_SCHEDULER_HPP
#define KPRIO_SCHEDULER_HPP

#include <atomic>
#include <cstdint>
#include <memory>
#include <vector>

#include "backend.hpp"
#include "task.hpp"

namespace kprio {

struct RunResult {
  BackendStats stats;
  bool timed_out = false;
  double wall_ms = 0.0;
};

class Scheduler;

// Handed to task bodies; spawn() enqueues follow-up work at the running place.
class TaskContext {
 public:
  TaskContext(Scheduler& s, PlaceId p) : sched_(s), place_(p) {}
  void spawn(Task t);
  PlaceId place() const { return place_; }

 private:
  Scheduler& sched_;
  PlaceId place_;
};

// Drives P worker threads against one backend until quiescence: a shared
// in-flight counter is incremented before every push and decremented after
// a task is executed or eliminated as dead, so counter == 0 means no task
// is stored or running.
class Scheduler {
 public:
  Scheduler(const SchedulerConfig& cfg, Backend& backend);

  // Pushes the root at place 0 and runs to quiescence (or wall-clock budget).
  RunResult run(const Task& root);

  void spawn(PlaceId place, Task t);

 private:
  friend class TaskContext;
  struct alignas(64) PlaceCounters {
    std::uint64_t pushes = 0;
    std::uint64_t pops = 0;
    std::uint64_t dead = 0;
    std::uint64_t spurious = 0;
    std::uint64_t next_id = 1;
  };

  void worker(PlaceId place);

  SchedulerConfig cfg_;
  Backend& backend_;
  std::vector<std::unique_ptr<PlaceCounters>> counters_;
  std::atomic<std::int64_t> in_flight_{0};
  std::atomic<bool> quiesced_{false};
  std::atomic<bool> aborted_{false};
  std::atomic<std::int64_t> deadline_ns_{0};
};

}  // namespace kprio

#endif
