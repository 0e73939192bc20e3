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
#include "hybrid_backend.hpp"

#include <algorithm>
#include <cassert>
#include <cstring>

namespace kprio {

HybridBackend::HybridBackend(PlaceId places, std::uint32_t k_max, std::uint64_t seed)
    : places_(places), k_max_(std::max(1u, k_max)) {
  assert(places_ >= 1);
  place_.reserve(places_);
  for (PlaceId p = 0; p < places_; ++p) {
    auto pl = std::make_unique<Place>();
    pl->watermark.assign(places_, 0);
    pl->rng.reseed(seed ^ (0xbf58476d1ce4e5b9ull * (p + 1)));
    pl->last_victim.store((p + 1) % std::max<PlaceId>(places_, 1),
                          std::memory_order_relaxed);
    pl->dir = std::make_unique<std::atomic<Row*>[]>(kDirRows);
    for (std::uint32_t i = 0; i < kDirRows; ++i)
      pl->dir[i].store(nullptr, std::memory_order_relaxed);
    place_.push_back(std::move(pl));
  }
}

HybridBackend::~HybridBackend() = default;

HybridBackend::HItem* HybridBackend::resolve(PlaceId owner, std::uint64_t seq) const {
  Row* row = place_[owner]->dir[seq >> kRowBits].load(std::memory_order_acquire);
  assert(row);
  return &row->items[seq & (kRowSize - 1)];
}

void HybridBackend::push(PlaceId place, std::uint32_t k, const Task& t) {
  Place& pl = *place_[place];
  std::uint32_t kk = std::min(k, k_max_);
  std::uint64_t seq = pl.seq_next;
  assert(seq < static_cast<std::uint64_t>(kDirRows) * kRowSize);
  if ((seq & (kRowSize - 1)) == 0) {
    auto row = std::make_unique<Row>();
    pl.dir[seq >> kRowBits].store(row.get(), std::memory_order_release);
    pl.rows_owned.push_back(std::move(row));
  }
  HItem* it = resolve(place, seq);
  it->task = t;
  it->task.k = kk;
  it->place = place;
  it->tag.store(static_cast<std::int64_t>(seq), std::memory_order_release);
  pl.seq_next = seq + 1;
  pl.appended.store(seq + 1, std::memory_order_release);
  pl.heap.push(Ref{it->task.key, seq, it});

  pl.debt = std::min(pl.debt - 1, static_cast<std::int64_t>(kk));
  bool row_full = ((seq + 1) & (kRowSize - 1)) == 0;
  if (pl.debt <= 0 || row_full) publish(pl, place);
}

void HybridBackend::publish(Place& pl, PlaceId self) {
  pl.debt = std::numeric_limits<std::int64_t>::max();
  if (pl.pub_upto == pl.seq_next) return;
  Desc* d = &pl.desc_arena.emplace_back();
  d->owner = self;
  d->start = pl.pub_upto;
  d->end = pl.seq_next;
  for (;;) {
    // Help drain the shared list before every append attempt.
    process_global_list(pl, self);
    Desc* t = tail_hint_.load(std::memory_order_acquire);
    if (!t) {
      Desc* expected = nullptr;
      if (head_.compare_exchange_strong(expected, d, std::memory_order_release,
                                        std::memory_order_acquire)) {
        tail_hint_.store(d, std::memory_order_release);
        break;
      }
      t = expected;
    }
    for (Desc* n = t->next.load(std::memory_order_acquire); n;
         n = t->next.load(std::memory_order_acquire)) {
      t = n;
    }
    Desc* expected = nullptr;
    if (t->next.compare_exchange_strong(expected, d, std::memory_order_release,
                                        std::memory_order_acquire)) {
      tail_hint_.store(d, std::memory_order_release);
      break;
    }
  }
  pl.pub_upto = pl.seq_next;
  desc_count_.fetch_add(1, std::memory_order_relaxed);
}

void HybridBackend::mirror_range(Place& pl, PlaceId owner, std::uint64_t from,
                                 std::uint64_t to) {
  for (std::uint64_t seq = from; seq < to; ++seq) {
    HItem* it = resolve(owner, seq);
    if (it->tag.load(std::memory_order_acquire) != static_cast<std::int64_t>(seq))
      continue;  // already taken
    pl.heap.push(Ref{it->task.key, seq, it});
  }
  std::uint64_t& w = pl.watermark[owner];
  w = std::max(w, to);
}

void HybridBackend::process_global_list(Place& pl, PlaceId self) {
  Desc* nxt = pl.last_desc ? pl.last_desc->next.load(std::memory_order_acquire)
                           : head_.load(std::memory_order_acquire);
  while (nxt) {
    if (nxt->owner != self) {
      std::uint64_t from = std::max(nxt->start, pl.watermark[nxt->owner]);
      mirror_range(pl, nxt->owner, from, std::max(from, nxt->end));
    }
    pl.last_desc = nxt;
    nxt = nxt->next.load(std::memory_order_acquire);
  }
}

bool HybridBackend::spy(Place& pl, PlaceId self) {
  if (places_ < 2) return false;
  ++pl.spies;
  PlaceId v = static_cast<PlaceId>(pl.rng.bounded(places_));
  if (v == self) v = (v + 1) % places_;
  for (PlaceId hop = 0; hop < places_; ++hop) {
    std::uint64_t a = place_[v]->appended.load(std::memory_order_acquire);
    std::uint64_t w = pl.watermark[v];
    if (a > w) {
      mirror_range(pl, v, w, a);
      pl.last_victim.store(v, std::memory_order_relaxed);
      return true;
    }
    // Victim shows nothing new: follow the trail of its own last victim.
    PlaceId nv = place_[v]->last_victim.load(std::memory_order_relaxed);
    if (nv == self || nv == v || nv >= places_) {
      nv = static_cast<PlaceId>(pl.rng.bounded(places_));
      if (nv == self) nv = (nv + 1) % places_;
    }
    v = nv;
  }
  return false;
}

std::optional<Task> HybridBackend::pop(PlaceId place) {
  Place& pl = *place_[place];
  do {
    process_global_list(pl, place);
    while (!pl.heap.empty()) {
      Ref r = pl.heap.top();
      pl.heap.pop();
      HItem* it = r.item;
      if (it->tag.load(std::memory_order_acquire) == static_cast<std::int64_t>(r.seq)) {
        Task out = it->task;  // capture before the take; the CAS certifies it
        std::int64_t expected = static_cast<std::int64_t>(r.seq);
        if (it->tag.compare_exchange_strong(expected, -1, std::memory_order_acq_rel,
                                            std::memory_order_relaxed)) {
          return out;
        }
      }
      process_global_list(pl, place);  // reference went stale: refresh, retry
    }
    spy(pl, place);
  } while (!pl.heap.empty());
  return std::nullopt;
}

std::uint64_t HybridBackend::steals_or_spies() const {
  std::uint64_t s = 0;
  for (const auto& pl : place_) s += pl->spies;
  return s;
}

std::size_t HybridBackend::queue_depth(PlaceId place) const {
  return place_[place]->heap.size();
}

std::uint64_t HybridBackend::debug_published_count(PlaceId place) const {
  return place_[place]->pub_upto;
}

std::uint64_t HybridBackend::debug_appended_count(PlaceId place) const {
  return place_[place]->appended.load(std::memory_order_acquire);
}

std::uint64_t HybridBackend::debug_descriptor_count() const {
  return desc_count_.load(std::memory_order_acquire);
}

std::uint64_t HybridBackend::debug_local_checksum(PlaceId place) const {
  const Place& pl = *place_[place];
  const std::uint64_t upto = pl.appended.load(std::memory_order_acquire);
  std::uint64_t acc = 0x9e3779b97f4a7c15ull;
  for (std::uint64_t seq = 0; seq < upto; ++seq) {
    const HItem* it = resolve(place, seq);
    std::uint64_t bits;
    static_assert(sizeof bits == sizeof it->task.key);
    std::memcpy(&bits, &it->task.key, sizeof bits);
    acc ^= bits + seq;
    acc = splitmix64(acc);
    acc ^= it->task.id + (static_cast<std::uint64_t>(it->task.k) << 40);
    acc = splitmix64(acc);
  }
  return acc;
}

}  // namespace kprio
