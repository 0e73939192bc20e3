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
#include "ws_backend.hpp"

#include <algorithm>

namespace kprio {

WsBackend::WsBackend(PlaceId places, std::uint64_t seed) {
  queues_.reserve(places);
  for (PlaceId p = 0; p < places; ++p) {
    auto q = std::make_unique<PlaceQueue>();
    q->rng.reseed(seed ^ static_cast<std::uint64_t>(p));
    queues_.push_back(std::move(q));
  }
}

void WsBackend::heap_push(std::vector<Task>& h, const Task& t) {
  h.push_back(t);
  std::push_heap(h.begin(), h.end(),
                 [](const Task& a, const Task& b) { return b.key < a.key; });
}

Task WsBackend::heap_pop_min(std::vector<Task>& h) {
  std::pop_heap(h.begin(), h.end(),
                [](const Task& a, const Task& b) { return b.key < a.key; });
  Task t = h.back();
  h.pop_back();
  return t;
}

void WsBackend::push(PlaceId place, std::uint32_t k, const Task& t) {
  Task copy = t;
  copy.k = k;
  PlaceQueue& q = *queues_[place];
  std::lock_guard<std::mutex> g(q.latch);
  heap_push(q.heap, copy);
}

std::optional<Task> WsBackend::pop(PlaceId place) {
  PlaceQueue& me = *queues_[place];
  {
    std::lock_guard<std::mutex> g(me.latch);
    if (!me.heap.empty()) return heap_pop_min(me.heap);
  }
  const PlaceId n = places();
  if (n == 1) return std::nullopt;

  // Own latch is released before probing; at most P probes per pop.
  for (PlaceId attempt = 0; attempt < n; ++attempt) {
    PlaceId victim;
    {
      std::lock_guard<std::mutex> g(me.latch);
      victim = static_cast<PlaceId>(me.rng.bounded(n - 1));
      if (victim >= place) ++victim;
      ++me.steals;
    }
    std::vector<Task> loot;
    {
      PlaceQueue& v = *queues_[victim];
      std::lock_guard<std::mutex> g(v.latch);
      const std::size_t sz = v.heap.size();
      const std::size_t take = sz / 2;  // worst half migrates
      if (take > 0) {
        std::sort(v.heap.begin(), v.heap.end(), better);
        loot.assign(v.heap.end() - static_cast<std::ptrdiff_t>(take), v.heap.end());
        v.heap.resize(sz - take);
        std::make_heap(v.heap.begin(), v.heap.end(),
                       [](const Task& a, const Task& b) { return b.key < a.key; });
      }
    }
    if (!loot.empty()) {
      std::lock_guard<std::mutex> g(me.latch);
      for (const Task& t : loot) heap_push(me.heap, t);
      return heap_pop_min(me.heap);
    }
  }
  return std::nullopt;
}

std::uint64_t WsBackend::steals_or_spies() const {
  std::uint64_t total = 0;
  for (const auto& q : queues_) {
    std::lock_guard<std::mutex> g(q->latch);
    total += q->steals;
  }
  return total;
}

std::size_t WsBackend::queue_depth(PlaceId place) const {
  const PlaceQueue& q = *queues_[place];
  std::lock_guard<std::mutex> g(q.latch);
  return q.heap.size();
}

}  // namespace kprio
