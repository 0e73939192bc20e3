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
#ifndef KPRIO_AUDIT_HPP
#define KPRIO_AUDIT_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "backend.hpp"

namespace kprio {

// Which hold-back discipline a queue claims to honor.
//   central_k:  an item may stay hidden only while fewer than its own k
//               live items were pushed after it, counted globally.
//   hybrid_per_place_k: the same per-item window, but counting only live
//               items pushed after it by its own place.
enum class Discipline { central_k, hybrid_per_place_k };

constexpr std::uint64_t kNoPopResult = ~0ull;

// One step of a sequential audit run. Pops leave id/key/k zeroed and carry
// the consumed task id (or kNoPopResult) in result.
struct TraceEvent {
  bool is_push = false;
  PlaceId place = 0;
  std::uint64_t id = kNoPopResult;
  double key = 0.0;
  std::uint32_t k = 0;
  std::uint64_t result = kNoPopResult;
  std::uint64_t timestamp = 0;
};

std::string trace_to_csv(const std::vector<TraceEvent>& trace);

// Incremental legality oracle for sequential runs. An item y is ignorable
// while fewer than y.k live items pushed after it exist (scoped per the
// discipline); popping x is legal iff every live item with a strictly
// better key than x is ignorable. The globally best live item is always
// legal, so the legal set is nonempty whenever anything is live.
class RelaxationOracle {
 public:
  explicit RelaxationOracle(Discipline d);

  void on_push(PlaceId place, std::uint64_t id, double key, std::uint32_t k);
  void on_pop(std::uint64_t id);

  bool live(std::uint64_t id) const;
  std::size_t live_count() const { return by_key_.size(); }
  bool legal_pop(std::uint64_t id) const;
  std::vector<std::uint64_t> legal_set() const;  // ids, ascending

 private:
  struct ItemInfo {
    double key = 0.0;
    std::uint32_t k = 0;
    PlaceId place = 0;
    std::uint64_t seq = 0;  // push index within the discipline scope
    bool is_live = false;
  };
  struct Fenwick {
    std::vector<std::int32_t> tree;  // 1-based
    std::int64_t total = 0;
    void add(std::size_t idx, std::int32_t delta);
    std::int64_t prefix(std::size_t count) const;  // sum of first `count`
  };

  bool ignorable(const ItemInfo& y) const;
  std::int64_t live_after(const ItemInfo& y) const;

  Discipline disc_;
  std::map<std::uint64_t, ItemInfo> items_;
  std::set<std::pair<double, std::uint64_t>> by_key_;  // live items only
  std::vector<Fenwick> scopes_;  // [0] for central; per place for hybrid
};

// Replays a trace (pushes and non-empty pops) and returns the legal set
// after the final event.
std::vector<std::uint64_t> legal_set_oracle(
    const std::vector<TraceEvent>& trace, Discipline d);

struct AuditTuning {
  std::vector<std::uint32_t> k_mix{8};
  double push_prob = 0.55;
  // Added to k on the backend call only, not in the recorded trace; a
  // nonzero bias plants a too-wide window the oracle must catch.
  std::uint32_t backend_k_bias = 0;
};

struct AuditResult {
  bool pass = false;
  std::uint64_t pops_succeeded = 0;
  std::string failure;
  std::vector<TraceEvent> counterexample;  // minimal failing prefix
};

// Single-threaded randomized push/pop driver; every consumed task is
// checked for liveness and window legality against the oracle.
AuditResult sequential_audit(Backend& backend, Discipline d,
                             std::uint64_t ops, std::uint64_t seed,
                             const AuditTuning& tuning = {});

struct StressOptions {
  BackendKind kind = BackendKind::central;
  PlaceId places = 8;
  std::uint64_t tasks = 1000000;  // total pushes, roots included
  std::uint64_t seed = 1;
  std::uint32_t k_max = 512;
  std::vector<std::uint32_t> k_mix{1, 8, 64, 512};
  bool freeze_one = false;  // park one worker once half the budget is spent
  std::uint64_t budget_ms = 240000;  // hard wall-clock cap, 0 disables
};

struct StressResult {
  bool pass = false;
  bool timed_out = false;
  std::uint64_t pushed = 0;
  std::uint64_t consumed = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t missing = 0;
  double elapsed_ms = 0.0;
  std::string detail;
};

// P workers drive one backend instance to quiescence on a self-spawning
// workload; consumption is verified against the push log by multiset
// equality. freeze_one parks one worker at an operation boundary before
// half the pushes have happened; the rest must still drain everything.
StressResult concurrent_stress(const StressOptions& opts);

}  // namespace kprio

#endif
