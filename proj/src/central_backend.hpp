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
#ifndef KPRIO_CENTRAL_BACKEND_HPP
#define KPRIO_CENTRAL_BACKEND_HPP

#include <atomic>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <queue>
#include <vector>

#include "backend.hpp"
#include "rng.hpp"

namespace kprio {

// Centralized k-priority structure.
//
// All items live in one logical unbounded array (a chain of fixed-size
// segments). A push with bound k claims a random empty slot in the window
// [tail, tail+k); when the window is full the pusher advances tail by k and
// retries. Pops scan [head, tail), mirror every foreign item into a local
// binary heap of references, and take the best reference with a CAS on the
// item's tag (tag == position while live, -1 once taken; positions are never
// reused for a different slot, which rules out ABA).
//
// Items beyond tail are invisible to scans. To honor each item's own bound
// under mixed k, every push also publishes a deadline (its global push
// sequence + k); once the push counter passes the smallest live deadline,
// poppers run a bounded scan of [tail, tail+k_max) and mirror the overdue
// items too. This only ever makes items visible earlier, never later.
//
// Empty slots hold the positional marker pos*2+1 instead of null. A slot in
// a recycled segment carries the marker of its *new* position, so a stale
// pusher's CAS (which expects the marker of the old position) fails instead
// of landing a task in the wrong place.
class CentralBackend final : public Backend {
 public:
  CentralBackend(PlaceId places, std::uint32_t k_max, std::uint64_t seed,
                 std::uint32_t seg_slots = 4096);
  ~CentralBackend() override;

  void push(PlaceId place, std::uint32_t k, const Task& t) override;
  std::optional<Task> pop(PlaceId place) override;

  const char* name() const override { return "central"; }
  PlaceId places() const override { return places_; }
  std::uint64_t steals_or_spies() const override;
  std::size_t queue_depth(PlaceId place) const override;

  std::uint64_t debug_tail() const { return tail_.load(std::memory_order_acquire); }
  std::uint64_t debug_push_count() const { return push_count_.load(std::memory_order_acquire); }
  std::uint64_t debug_segments_allocated() const { return segments_allocated_.load(std::memory_order_acquire); }
  std::uint64_t debug_segments_recycled() const { return segments_recycled_.load(std::memory_order_acquire); }
  // Position of the live item whose task id matches, if any (tests only).
  std::optional<std::uint64_t> debug_live_pos_of(std::uint64_t task_id) const;

 private:
  struct Segment;
  struct Item {
    Task task;
    std::uint64_t seq = 0;   // global push order
    std::uint32_t k = 1;
    PlaceId place = 0;
    Segment* seg = nullptr;
    std::atomic<std::int64_t> tag{-1};
  };

  struct Segment {
    std::atomic<std::uint64_t> base{0};
    std::atomic<Segment*> next{nullptr};
    std::atomic<std::uint32_t> taken{0};
    std::atomic<std::uint32_t> refcnt{0};
    std::atomic<bool> retired{false};
    std::unique_ptr<std::atomic<std::uint64_t>[]> slots;
  };

  struct Ref {
    double key;
    std::uint64_t pos;
    Item* item;
  };
  struct RefWorse {
    bool operator()(const Ref& a, const Ref& b) const { return a.key > b.key; }
  };

  struct alignas(64) Place {
    std::priority_queue<Ref, std::vector<Ref>, RefWorse> heap;
    std::uint64_t head = 0;
    Segment* scan_seg = nullptr;   // pinned by this place's refcnt share
    Rng rng;
    std::vector<Item*> free_items;
    std::deque<Item> arena;
    std::uint64_t probes = 0;
  };

  static constexpr std::int64_t kTaken = -1;
  static Segment* sentinel() { return reinterpret_cast<Segment*>(std::uintptr_t(1)); }
  static std::uint64_t marker(std::uint64_t pos) { return (pos << 1) | 1u; }

  Item* alloc_item(Place& pl);
  void reset_segment(Segment* s, std::uint64_t new_base);
  Segment* grow(Segment* last);
  Segment* locate(Place& pl, std::uint64_t pos, bool may_grow);
  void publish_deadline(std::uint64_t ddl);
  void scan(Place& pl, PlaceId self);
  void maybe_expiry_scan(Place& pl, PlaceId self);
  void after_take(Place& pl, Item* it);
  void try_retire(Place& pl, Segment* s);
  void relink_at_end(Place& pl, Segment* s);

  PlaceId places_;
  std::uint32_t k_max_;
  std::uint32_t seg_slots_;
  std::atomic<std::uint64_t> tail_{0};
  std::atomic<std::uint64_t> push_count_{0};
  std::atomic<std::uint64_t> earliest_deadline_{~0ull};
  std::vector<std::unique_ptr<Place>> place_;

  mutable std::mutex alloc_mu_;
  std::vector<std::unique_ptr<Segment>> registry_;  // owns all segments ever
  Segment* spare_ = nullptr;
  std::atomic<std::uint64_t> segments_allocated_{0};
  std::atomic<std::uint64_t> segments_recycled_{0};
};

}  // namespace kprio

#endif
