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
#include "scheduler.hpp"

#include <chrono>
#include <thread>

namespace kprio {

namespace {
std::int64_t now_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}
}  // namespace

void TaskContext::spawn(Task t) { sched_.spawn(place_, t); }

Scheduler::Scheduler(const SchedulerConfig& cfg, Backend& backend)
    : cfg_(cfg), backend_(backend) {
  for (PlaceId p = 0; p < cfg_.places; ++p)
    counters_.push_back(std::make_unique<PlaceCounters>());
}

void Scheduler::spawn(PlaceId place, Task t) {
  PlaceCounters& c = *counters_[place];
  if (t.id == 0)
    t.id = (static_cast<std::uint64_t>(place) << 48) | c.next_id++;
  ++c.pushes;
  // Increment before the task becomes visible: a pop can only observe a
  // task whose in-flight contribution is already counted.
  in_flight_.fetch_add(1, std::memory_order_relaxed);
  backend_.push(place, t.k, t);
}

void Scheduler::worker(PlaceId place) {
  PlaceCounters& c = *counters_[place];
  std::uint32_t idle_spins = 0;
  const std::int64_t deadline = deadline_ns_.load(std::memory_order_relaxed);
  while (!quiesced_.load(std::memory_order_acquire) &&
         !aborted_.load(std::memory_order_relaxed)) {
    std::optional<Task> t = backend_.pop(place);
    if (t) {
      idle_spins = 0;
      if (t->live != nullptr && !t->live(t->env, *t)) {
        ++c.dead;
      } else {
        ++c.pops;
        if (t->fn != nullptr) {
          TaskContext ctx(*this, place);
          t->fn(ctx, *t);
        }
      }
      if (in_flight_.fetch_sub(1, std::memory_order_acq_rel) == 1)
        quiesced_.store(true, std::memory_order_release);
    } else {
      if (in_flight_.load(std::memory_order_acquire) == 0) {
        quiesced_.store(true, std::memory_order_release);
        break;
      }
      ++c.spurious;
      if (++idle_spins < 16) {
        // brief spin; tasks usually reappear quickly
      } else {
        std::this_thread::yield();
        if (deadline != 0 && (idle_spins & 0x3ff) == 0 && now_ns() > deadline)
          aborted_.store(true, std::memory_order_relaxed);
      }
    }
  }
}

RunResult Scheduler::run(const Task& root) {
  const std::int64_t t0 = now_ns();
  deadline_ns_.store(
      cfg_.budget_ms == 0
          ? 0
          : t0 + static_cast<std::int64_t>(cfg_.budget_ms) * 1000000,
      std::memory_order_relaxed);
  quiesced_.store(false, std::memory_order_relaxed);
  aborted_.store(false, std::memory_order_relaxed);

  // Workers have not started; pushing at place 0 from this thread is the
  // owner-only path.
  spawn(0, root);

  std::vector<std::thread> threads;
  threads.reserve(cfg_.places);
  for (PlaceId p = 0; p < cfg_.places; ++p)
    threads.emplace_back([this, p] { worker(p); });
  for (auto& th : threads) th.join();

  RunResult r;
  r.timed_out = aborted_.load(std::memory_order_relaxed) &&
                !quiesced_.load(std::memory_order_relaxed);
  r.wall_ms = static_cast<double>(now_ns() - t0) / 1e6;
  for (const auto& c : counters_) {
    r.stats.pushes += c->pushes;
    r.stats.pops += c->pops;
    r.stats.dead_tasks_eliminated += c->dead;
    r.stats.spurious_failures += c->spurious;
  }
  r.stats.steals_or_spies = backend_.steals_or_spies();
  return r;
}

}  // namespace kprio
