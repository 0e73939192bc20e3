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
#include "central_backend.hpp"

#include <algorithm>
#include <cassert>

namespace kprio {

CentralBackend::CentralBackend(PlaceId places, std::uint32_t k_max,
                               std::uint64_t seed, std::uint32_t seg_slots)
    : places_(places), k_max_(std::max(1u, k_max)), seg_slots_(seg_slots) {
  assert(places_ >= 1 && seg_slots_ >= 2);
  // An insertion window never spans more than two segments.
  assert(k_max_ <= seg_slots_);
  auto first = std::make_unique<Segment>();
  reset_segment(first.get(), 0);
  Segment* f = first.get();
  registry_.push_back(std::move(first));
  segments_allocated_.store(1, std::memory_order_relaxed);
  place_.reserve(places_);
  for (PlaceId p = 0; p < places_; ++p) {
    auto pl = std::make_unique<Place>();
    pl->scan_seg = f;
    pl->rng.reseed(seed ^ (0x9e3779b97f4a7c15ull * (p + 1)));
    place_.push_back(std::move(pl));
  }
}

CentralBackend::~CentralBackend() = default;

void CentralBackend::reset_segment(Segment* s, std::uint64_t new_base) {
  if (!s->slots) s->slots = std::make_unique<std::atomic<std::uint64_t>[]>(seg_slots_);
  s->base.store(new_base, std::memory_order_relaxed);
  for (std::uint32_t i = 0; i < seg_slots_; ++i)
    s->slots[i].store(marker(new_base + i), std::memory_order_relaxed);
  s->taken.store(0, std::memory_order_relaxed);
  s->refcnt.store(places_, std::memory_order_relaxed);
  s->retired.store(false, std::memory_order_relaxed);
  s->next.store(nullptr, std::memory_order_relaxed);
}

CentralBackend::Item* CentralBackend::alloc_item(Place& pl) {
  if (!pl.free_items.empty()) {
    Item* it = pl.free_items.back();
    pl.free_items.pop_back();
    return it;
  }
  pl.arena.emplace_back();
  return &pl.arena.back();
}

CentralBackend::Segment* CentralBackend::grow(Segment* last) {
  std::lock_guard<std::mutex> g(alloc_mu_);
  Segment* nxt = last->next.load(std::memory_order_acquire);
  if (nxt) return nxt;
  Segment* s = spare_;
  if (s) {
    spare_ = nullptr;
  } else {
    auto owned = std::make_unique<Segment>();
    s = owned.get();
    registry_.push_back(std::move(owned));
    segments_allocated_.fetch_add(1, std::memory_order_relaxed);
  }
  reset_segment(s, last->base.load(std::memory_order_relaxed) + seg_slots_);
  Segment* expected = nullptr;
  if (last->next.compare_exchange_strong(expected, s, std::memory_order_release,
                                         std::memory_order_acquire)) {
    return s;
  }
  // A recycler appended concurrently; keep ours for the next growth.
  spare_ = s;
  return expected;
}

// Resolve the segment hosting pos by walking from this place's pinned scan
// segment. Every segment from the pin onward holds a refcnt share for us and
// cannot be recycled mid-walk, so base reads along the way are stable.
CentralBackend::Segment* CentralBackend::locate(Place& pl, std::uint64_t pos,
                                                bool may_grow) {
  Segment* cur = pl.scan_seg;
  while (cur->base.load(std::memory_order_relaxed) + seg_slots_ <= pos) {
    Segment* nxt = cur->next.load(std::memory_order_acquire);
    if (!nxt) {
      if (!may_grow) return nullptr;
      nxt = grow(cur);
    }
    assert(nxt != sentinel());
    cur = nxt;
  }
  return cur;
}

void CentralBackend::publish_deadline(std::uint64_t ddl) {
  std::uint64_t cur = earliest_deadline_.load(std::memory_order_acquire);
  while (ddl < cur && !earliest_deadline_.compare_exchange_weak(
                          cur, ddl, std::memory_order_acq_rel,
                          std::memory_order_acquire)) {
  }
}

void CentralBackend::push(PlaceId place, std::uint32_t k, const Task& t) {
  Place& pl = *place_[place];
  std::uint32_t kk = std::clamp(k, 1u, k_max_);
  Item* it = alloc_item(pl);
  it->task = t;
  it->task.k = kk;
  it->k = kk;
  it->place = place;
  it->seq = push_count_.fetch_add(1, std::memory_order_acq_rel);
  for (;;) {
    std::uint64_t t0 = tail_.load(std::memory_order_acquire);
    Segment* lo = locate(pl, t0, true);
    std::uint64_t lo_end = lo->base.load(std::memory_order_relaxed) + seg_slots_;
    Segment* hi = nullptr;  // second segment if the window crosses a boundary
    std::uint64_t start = pl.rng.bounded(kk);
    for (std::uint32_t i = 0; i < kk; ++i) {
      std::uint64_t pos = t0 + (start + i) % kk;
      Segment* seg = lo;
      if (pos >= lo_end) {
        if (!hi) hi = locate(pl, pos, true);
        seg = hi;
      }
      std::atomic<std::uint64_t>& slot =
          seg->slots[pos - seg->base.load(std::memory_order_relaxed)];
      std::uint64_t expected = marker(pos);
      if (slot.load(std::memory_order_acquire) != expected) continue;
      it->tag.store(static_cast<std::int64_t>(pos), std::memory_order_relaxed);
      it->seg = seg;
      if (slot.compare_exchange_strong(expected, reinterpret_cast<std::uint64_t>(it),
                                       std::memory_order_release,
                                       std::memory_order_relaxed)) {
        // Deadline goes out only after the item sits in a slot, so a
        // concurrent deadline recompute can never drop it from the minimum.
        publish_deadline(it->seq + kk + 1);
        pl.heap.push(Ref{it->task.key, pos, it});
        return;
      }
    }
    // Window [t0, t0+k) observed full: advance tail and try the next window.
    tail_.compare_exchange_strong(t0, t0 + kk, std::memory_order_acq_rel,
                                  std::memory_order_relaxed);
  }
}

void CentralBackend::scan(Place& pl, PlaceId self) {
  std::uint64_t t = tail_.load(std::memory_order_acquire);
  while (pl.head < t) {
    while (pl.head >= pl.scan_seg->base.load(std::memory_order_relaxed) + seg_slots_) {
      Segment* nxt = pl.scan_seg->next.load(std::memory_order_acquire);
      assert(nxt && nxt != sentinel());
      Segment* old = pl.scan_seg;
      pl.scan_seg = nxt;
      std::uint32_t left = old->refcnt.fetch_sub(1, std::memory_order_acq_rel) - 1;
      if (left == 0 && old->taken.load(std::memory_order_acquire) == seg_slots_)
        try_retire(pl, old);
    }
    Segment* seg = pl.scan_seg;
    std::uint64_t v = seg->slots[pl.head - seg->base.load(std::memory_order_relaxed)]
                          .load(std::memory_order_acquire);
    assert((v & 1) == 0);  // below tail every slot holds an item
    Item* it = reinterpret_cast<Item*>(v);
    if (it->place != self &&
        it->tag.load(std::memory_order_acquire) == static_cast<std::int64_t>(pl.head)) {
      pl.heap.push(Ref{it->task.key, pl.head, it});
    }
    ++pl.head;
  }
}

void CentralBackend::maybe_expiry_scan(Place& pl, PlaceId self) {
  std::uint64_t observed = earliest_deadline_.load(std::memory_order_acquire);
  std::uint64_t pc = push_count_.load(std::memory_order_acquire);
  if (pc < observed) return;
  // Some beyond-tail item has exhausted its push budget. Mirror every overdue
  // foreign item and recompute the earliest deadline over everything hidden.
  std::uint64_t t = tail_.load(std::memory_order_acquire);
  std::uint64_t newmin = ~0ull;
  for (std::uint64_t pos = t; pos < t + k_max_; ++pos) {
    Segment* seg = locate(pl, pos, false);
    if (!seg) break;
    std::uint64_t v = seg->slots[pos - seg->base.load(std::memory_order_relaxed)]
                          .load(std::memory_order_acquire);
    if (v & 1) continue;
    Item* it = reinterpret_cast<Item*>(v);
    if (it->tag.load(std::memory_order_acquire) != static_cast<std::int64_t>(pos)) continue;
    std::uint64_t seq = it->seq;
    std::uint32_t k = it->k;
    PlaceId owner = it->place;
    double key = it->task.key;
    if (it->tag.load(std::memory_order_acquire) != static_cast<std::int64_t>(pos)) continue;
    std::uint64_t ddl = seq + k + 1;
    // Overdue-but-live deadlines stay in the minimum so pops made from any
    // place keep rescanning until those items are actually consumed.
    newmin = std::min(newmin, ddl);
    if (pc >= ddl && owner != self) pl.heap.push(Ref{key, pos, it});
  }
  earliest_deadline_.compare_exchange_strong(observed, newmin, std::memory_order_acq_rel,
                                             std::memory_order_relaxed);
}

void CentralBackend::after_take(Place& pl, Item* it) {
  Segment* seg = it->seg;
  pl.free_items.push_back(it);
  std::uint32_t cnt = seg->taken.fetch_add(1, std::memory_order_acq_rel) + 1;
  if (cnt == seg_slots_ && seg->refcnt.load(std::memory_order_acquire) == 0)
    try_retire(pl, seg);
}

void CentralBackend::try_retire(Place& pl, Segment* s) {
  if (s->retired.exchange(true, std::memory_order_acq_rel)) return;
  // A fully consumed segment that every scan cursor has passed is unreachable
  // from any pinned walk. Poison its next pointer so an appender still holding
  // it as the list end backs off, then reuse it as fresh capacity at the end.
  s->next.store(sentinel(), std::memory_order_release);
  relink_at_end(pl, s);
  segments_recycled_.fetch_add(1, std::memory_order_relaxed);
}

void CentralBackend::relink_at_end(Place& pl, Segment* s) {
  for (;;) {
    Segment* last = pl.scan_seg;
    for (;;) {
      Segment* nxt = last->next.load(std::memory_order_acquire);
      if (!nxt) break;
      assert(nxt != sentinel());
      last = nxt;
    }
    reset_segment(s, last->base.load(std::memory_order_relaxed) + seg_slots_);
    Segment* expected = nullptr;
    if (last->next.compare_exchange_strong(expected, s, std::memory_order_release,
                                           std::memory_order_acquire)) {
      return;
    }
  }
}

std::optional<Task> CentralBackend::pop(PlaceId place) {
  Place& pl = *place_[place];
  maybe_expiry_scan(pl, place);
  scan(pl, place);
  while (!pl.heap.empty()) {
    Ref r = pl.heap.top();
    pl.heap.pop();
    Item* it = r.item;
    if (it->tag.load(std::memory_order_acquire) == static_cast<std::int64_t>(r.pos)) {
      Task out = it->task;  // capture before the take; the CAS certifies it
      std::int64_t expected = static_cast<std::int64_t>(r.pos);
      if (it->tag.compare_exchange_strong(expected, kTaken, std::memory_order_acq_rel,
                                          std::memory_order_relaxed)) {
        after_take(pl, it);
        return out;
      }
    }
    scan(pl, place);  // reference went stale: pick up anything new, retry
  }
  // Empty so far: probe one random slot beyond tail. An item found there may
  // be taken only if its own bound is already covered by the probe offset.
  ++pl.probes;
  std::uint64_t t = tail_.load(std::memory_order_acquire);
  std::uint64_t off = pl.rng.bounded(k_max_);
  std::uint64_t pos = t + off;
  Segment* seg = locate(pl, pos, false);
  if (!seg) return std::nullopt;
  std::uint64_t v = seg->slots[pos - seg->base.load(std::memory_order_relaxed)]
                        .load(std::memory_order_acquire);
  if (v & 1) return std::nullopt;
  Item* it = reinterpret_cast<Item*>(v);
  if (it->tag.load(std::memory_order_acquire) != static_cast<std::int64_t>(pos))
    return std::nullopt;
  std::uint32_t ik = it->k;
  Task out = it->task;
  if (tail_.load(std::memory_order_acquire) != t) return std::nullopt;
  if (ik > off) return std::nullopt;
  std::int64_t expected = static_cast<std::int64_t>(pos);
  if (it->tag.compare_exchange_strong(expected, kTaken, std::memory_order_acq_rel,
                                      std::memory_order_relaxed)) {
    after_take(pl, it);
    return out;
  }
  return std::nullopt;
}

std::uint64_t CentralBackend::steals_or_spies() const {
  std::uint64_t s = 0;
  for (const auto& pl : place_) s += pl->probes;
  return s;
}

std::size_t CentralBackend::queue_depth(PlaceId place) const {
  return place_[place]->heap.size();
}

std::optional<std::uint64_t> CentralBackend::debug_live_pos_of(std::uint64_t task_id) const {
  std::lock_guard<std::mutex> g(alloc_mu_);
  for (const auto& seg : registry_) {
    for (std::uint32_t i = 0; i < seg_slots_; ++i) {
      std::uint64_t v = seg->slots[i].load(std::memory_order_acquire);
      if (v & 1) continue;
      const Item* it = reinterpret_cast<const Item*>(v);
      std::int64_t tag = it->tag.load(std::memory_order_acquire);
      if (tag >= 0 && it->task.id == task_id) return static_cast<std::uint64_t>(tag);
    }
  }
  return std::nullopt;
}

}  // namespace kprio
