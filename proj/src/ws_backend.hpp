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
#ifndef KPRIO_WS_BACKEND_HPP
#define KPRIO_WS_BACKEND_HPP

#include <atomic>
#include <memory>
#include <mutex>
#include <vector>

#include "backend.hpp"
#include "rng.hpp"

namespace kprio {

// Priority work-stealing baseline: one latched binary heap per place.
// A thief removes the worst floor(size/2) tasks of one victim; the victim
// keeps its best half. At most P victim probes per pop, then the pop fails.
class WsBackend final : public Backend {
 public:
  WsBackend(PlaceId places, std::uint64_t seed);

  void push(PlaceId place, std::uint32_t k, const Task& t) override;
  std::optional<Task> pop(PlaceId place) override;

  const char* name() const override { return "ws"; }
  PlaceId places() const override { return static_cast<PlaceId>(queues_.size()); }
  std::uint64_t steals_or_spies() const override;
  std::size_t queue_depth(PlaceId place) const override;

 private:
  struct alignas(64) PlaceQueue {
    mutable std::mutex latch;
    std::vector<Task> heap;  // min-heap on key
    Rng rng;
    std::uint64_t steals = 0;
  };

  static bool better(const Task& a, const Task& b) { return a.key < b.key; }
  static void heap_push(std::vector<Task>& h, const Task& t);
  static Task heap_pop_min(std::vector<Task>& h);

  std::vector<std::unique_ptr<PlaceQueue>> queues_;
};

}  // namespace kprio

#endif
