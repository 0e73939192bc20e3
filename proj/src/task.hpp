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
#ifndef KPRIO_TASK_HPP
#define KPRIO_TASK_HPP

#include <cstdint>

namespace kprio {

using PlaceId = std::uint32_t;

class TaskContext;
struct Task;

// Executed when a worker pops the task. May spawn via the context.
using TaskFn = void (*)(TaskContext&, const Task&);
// Optional liveness predicate; a popped task whose hook reports dead is
// dropped without executing and counted separately.
using TaskLiveFn = bool (*)(const void* env, const Task&);

// Plain-data task record. Lower key = higher priority. k bounds how many
// later pushes may hide this task from poppers (0 = none).
struct Task {
  double key = 0.0;
  std::uint32_t k = 0;
  std::uint32_t pad_ = 0;
  std::uint64_t id = 0;
  std::uint64_t a = 0;  // payload word (application-defined)
  std::uint64_t b = 0;  // payload word (application-defined)
  void* env = nullptr;
  TaskFn fn = nullptr;
  TaskLiveFn live = nullptr;
};

struct SchedulerConfig {
  PlaceId places = 1;
  std::uint32_t k_max = 512;
  std::uint64_t seed = 1;
  // Wall-clock budget for run-to-quiescence; 0 disables the watchdog.
  std::uint64_t budget_ms = 120000;
};

// Aggregated over all places at the end of a run.
// Invariant: pops + dead_tasks_eliminated <= pushes while running,
// equality at quiescence.
struct BackendStats {
  std::uint64_t pushes = 0;
  std::uint64_t pops = 0;
  std::uint64_t dead_tasks_eliminated = 0;
  std::uint64_t steals_or_spies = 0;
  std::uint64_t spurious_failures = 0;
};

}  // namespace kprio

#endif
