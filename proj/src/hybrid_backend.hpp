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
#ifndef KPRIO_HYBRID_BACKEND_HPP
#define KPRIO_HYBRID_BACKEND_HPP

#include <array>
#include <atomic>
#include <cstdint>
#include <deque>
#include <limits>
#include <memory>
#include <optional>
#include <queue>
#include <vector>

#include "backend.hpp"
#include "rng.hpp"

namespace kprio {

// Hybrid k-priority structure.
//
// Each place appends its pushes to a private append-only list (rows of a
// per-place arena, addressed by a local sequence number). Items become
// globally visible in batches: a places-shared list of published descriptors,
// each covering a contiguous local sequence range. A place's publication debt
// follows the recurrence  debt' = min(debt - 1, k_of_push)  starting from
// "infinity"; hitting zero publishes everything pending. A batch is also
// forced whenever an arena row fills, which only ever makes items visible
// earlier than required.
//
// Pops drain a local heap of references (own pushes enter it immediately;
// foreign items arrive via the descriptor list). An empty place spies: it
// reads a victim's appended-but-unpublished tail directly, which again only
// accelerates visibility. Items are taken exactly once with a CAS on the
// item's tag (local sequence while live, -1 once taken; sequences are never
// reused, which rules out ABA).
class HybridBackend final : public Backend {
 public:
  HybridBackend(PlaceId places, std::uint32_t k_max, std::uint64_t seed);
  ~HybridBackend() override;

  void push(PlaceId place, std::uint32_t k, const Task& t) override;
  std::optional<Task> pop(PlaceId place) override;

  const char* name() const override { return "hybrid"; }
  PlaceId places() const override { return places_; }
  std::uint64_t steals_or_spies() const override;
  std::size_t queue_depth(PlaceId place) const override;

  std::uint64_t debug_published_count(PlaceId place) const;
  std::uint64_t debug_appended_count(PlaceId place) const;
  std::uint64_t debug_descriptor_count() const;
  // Content hash over a place's appended items (key, id, k). Take state is
  // deliberately excluded: consuming an item must not count as mutating the
  // owner's list.
  std::uint64_t debug_local_checksum(PlaceId place) const;

 private:
  static constexpr std::uint32_t kRowBits = 10;
  static constexpr std::uint32_t kRowSize = 1u << kRowBits;   // items per row
  static constexpr std::uint32_t kDirRows = 1u << 16;         // rows per place

  struct HItem {
    Task task;
    PlaceId place = 0;
    std::atomic<std::int64_t> tag{-1};  // local seq while live, -1 taken
  };
  struct Row {
    std::array<HItem, kRowSize> items;
  };
  struct Desc {
    PlaceId owner = 0;
    std::uint64_t start = 0;
    std::uint64_t end = 0;
    std::atomic<Desc*> next{nullptr};
  };
  struct Ref {
    double key;
    std::uint64_t seq;
    HItem* item;
  };
  struct RefWorse {
    bool operator()(const Ref& a, const Ref& b) const { return a.key > b.key; }
  };

  struct alignas(64) Place {
    // Owner-only state.
    std::uint64_t seq_next = 0;
    std::uint64_t pub_upto = 0;
    std::int64_t debt = std::numeric_limits<std::int64_t>::max();
    std::deque<std::unique_ptr<Row>> rows_owned;
    std::deque<Desc> desc_arena;
    std::priority_queue<Ref, std::vector<Ref>, RefWorse> heap;
    Desc* last_desc = nullptr;
    std::vector<std::uint64_t> watermark;  // per victim: seqs already mirrored
    Rng rng;
    std::uint64_t spies = 0;
    // Shared state.
    std::atomic<std::uint64_t> appended{0};
    std::atomic<PlaceId> last_victim{0};
    std::unique_ptr<std::atomic<Row*>[]> dir;
  };

  HItem* resolve(PlaceId owner, std::uint64_t seq) const;
  void publish(Place& pl, PlaceId self);
  void process_global_list(Place& pl, PlaceId self);
  void mirror_range(Place& pl, PlaceId owner, std::uint64_t from, std::uint64_t to);
  bool spy(Place& pl, PlaceId self);

  PlaceId places_;
  std::uint32_t k_max_;
  std::vector<std::unique_ptr<Place>> place_;
  std::atomic<Desc*> head_{nullptr};
  std::atomic<Desc*> tail_hint_{nullptr};
  std::atomic<std::uint64_t> desc_count_{0};
};

}  // namespace kprio

#endif
