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
#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "audit.hpp"
#include "central_backend.hpp"
#include "hybrid_backend.hpp"
#include "rng.hpp"
#include "ws_backend.hpp"

using namespace kprio;

namespace {

// Definitional reference: rebuild the live list in push order and test the
// window rule by direct counting. Deliberately quadratic and independent of
// the Fenwick bookkeeping in the production oracle.
std::vector<std::uint64_t> brute_legal(const std::vector<TraceEvent>& trace,
                                       Discipline d) {
  struct Item {
    PlaceId place;
    std::uint64_t id;
    double key;
    std::uint32_t k;
  };
  std::vector<Item> in_order;
  std::set<std::uint64_t> taken;
  for (const TraceEvent& ev : trace) {
    if (ev.is_push)
      in_order.push_back({ev.place, ev.id, ev.key, ev.k});
    else if (ev.result != kNoPopResult)
      taken.insert(ev.result);
  }
  std::vector<Item> live;
  for (const Item& it : in_order)
    if (!taken.count(it.id)) live.push_back(it);
  auto ignorable = [&](std::size_t yi) {
    std::uint64_t after = 0;
    for (std::size_t z = yi + 1; z < live.size(); ++z)
      if (d == Discipline::central_k || live[z].place == live[yi].place)
        ++after;
    return after < live[yi].k;
  };
  std::vector<std::uint64_t> out;
  for (std::size_t xi = 0; xi < live.size(); ++xi) {
    bool ok = true;
    for (std::size_t yi = 0; yi < live.size() && ok; ++yi)
      if (live[yi].key < live[xi].key && !ignorable(yi)) ok = false;
    if (ok) out.push_back(live[xi].id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

TraceEvent push_ev(PlaceId place, std::uint64_t id, double key,
                   std::uint32_t k) {
  TraceEvent ev;
  ev.is_push = true;
  ev.place = place;
  ev.id = id;
  ev.key = key;
  ev.k = k;
  return ev;
}

TraceEvent pop_ev(PlaceId place, std::uint64_t result) {
  TraceEvent ev;
  ev.place = place;
  ev.result = result;
  return ev;
}

struct DfsStats {
  std::uint64_t nodes = 0;
  std::uint64_t mismatches = 0;
  std::uint64_t empty_legal_with_live = 0;
};

// Exhaustive state enumeration over a tiny alphabet: every prefix is checked
// oracle-vs-reference, and pops branch over every live item so all reachable
// live configurations appear.
void dfs_enumerate(std::vector<TraceEvent>& trace,
                   std::vector<std::uint64_t>& live_ids, std::uint64_t& next_id,
                   Discipline d, PlaceId places, std::uint32_t depth_left,
                   DfsStats& st) {
  st.nodes += 1;
  const auto got = legal_set_oracle(trace, d);
  const auto want = brute_legal(trace, d);
  if (got != want) st.mismatches += 1;
  if (!live_ids.empty() && got.empty()) st.empty_legal_with_live += 1;
  if (depth_left == 0) return;

  for (PlaceId pl = 0; pl < places; ++pl) {
    for (double key : {1.0, 2.0}) {
      for (std::uint32_t k : {0u, 1u}) {
        const std::uint64_t id = next_id++;
        trace.push_back(push_ev(pl, id, key, k));
        live_ids.push_back(id);
        dfs_enumerate(trace, live_ids, next_id, d, places, depth_left - 1, st);
        live_ids.pop_back();
        trace.pop_back();
        --next_id;
      }
    }
  }
  for (std::size_t i = 0; i < live_ids.size(); ++i) {
    const std::uint64_t victim = live_ids[i];
    trace.push_back(pop_ev(0, victim));
    live_ids.erase(live_ids.begin() + static_cast<std::ptrdiff_t>(i));
    dfs_enumerate(trace, live_ids, next_id, d, places, depth_left - 1, st);
    live_ids.insert(live_ids.begin() + static_cast<std::ptrdiff_t>(i), victim);
    trace.pop_back();
  }
}

}  // namespace

TEST_CASE("oracle: zero window leaves only the best item legal") {
  std::vector<TraceEvent> tr{push_ev(0, 0, 5.0, 0), push_ev(0, 1, 1.0, 0),
                             push_ev(0, 2, 3.0, 0)};
  CHECK(legal_set_oracle(tr, Discipline::central_k) ==
        std::vector<std::uint64_t>{1});
}

TEST_CASE("oracle: window of two admits all of a three-item push burst") {
  std::vector<TraceEvent> tr{push_ev(0, 0, 5.0, 2), push_ev(0, 1, 1.0, 2),
                             push_ev(0, 2, 3.0, 2)};
  CHECK(legal_set_oracle(tr, Discipline::central_k) ==
        std::vector<std::uint64_t>({0, 1, 2}));
  // The two better items are both among the newest two pushes, so the worst
  // item is poppable; dropping the newest-push status of key 1 (by a fourth
  // push) revokes that.
  tr.push_back(push_ev(0, 3, 9.0, 2));
  tr.push_back(push_ev(0, 4, 9.5, 2));
  const auto legal = legal_set_oracle(tr, Discipline::central_k);
  CHECK(!std::binary_search(legal.begin(), legal.end(), 0));
}

TEST_CASE("oracle: per-place windows exclude each place's newest item") {
  std::vector<TraceEvent> tr{push_ev(0, 0, 4.0, 1), push_ev(0, 1, 2.0, 1),
                             push_ev(1, 2, 3.0, 1), push_ev(1, 3, 1.0, 1)};
  const auto legal = legal_set_oracle(tr, Discipline::hybrid_per_place_k);
  CHECK(legal == std::vector<std::uint64_t>({1, 2, 3}));
  CHECK(legal == brute_legal(tr, Discipline::hybrid_per_place_k));
  // Same trace under the global discipline: key 3.0 has a non-ignorable
  // better item (key 2.0 aged out by two later global pushes).
  const auto global = legal_set_oracle(tr, Discipline::central_k);
  CHECK(global == brute_legal(tr, Discipline::central_k));
}

TEST_CASE("oracle matches the reference on every prefix, exhaustively") {
  DfsStats st;
  std::vector<TraceEvent> trace;
  std::vector<std::uint64_t> live;
  std::uint64_t next_id = 0;
  dfs_enumerate(trace, live, next_id, Discipline::central_k, 1, 7, st);
  CHECK(st.mismatches == 0);
  CHECK(st.empty_legal_with_live == 0);
  CHECK(st.nodes > 200000);

  DfsStats sh;
  trace.clear();
  live.clear();
  next_id = 0;
  dfs_enumerate(trace, live, next_id, Discipline::hybrid_per_place_k, 2, 6,
                sh);
  CHECK(sh.mismatches == 0);
  CHECK(sh.empty_legal_with_live == 0);
  CHECK(sh.nodes > 500000);
}

TEST_CASE("oracle matches the reference on random twenty-op traces") {
  const double keys[] = {0.5, 1.5, 2.5, 3.5};
  for (Discipline d : {Discipline::central_k, Discipline::hybrid_per_place_k}) {
    Rng rng(d == Discipline::central_k ? 2024 : 4048);
    for (int t = 0; t < 1500; ++t) {
      std::vector<TraceEvent> trace;
      std::vector<std::uint64_t> live;
      std::uint64_t next_id = 0;
      for (int op = 0; op < 20; ++op) {
        if (live.empty() || rng.unit() < 0.6) {
          const PlaceId pl = static_cast<PlaceId>(rng.bounded(3));
          const double key = keys[rng.bounded(4)];
          const std::uint32_t k = static_cast<std::uint32_t>(rng.bounded(4));
          trace.push_back(push_ev(pl, next_id, key, k));
          live.push_back(next_id);
          ++next_id;
        } else {
          const std::size_t i = rng.bounded(live.size());
          trace.push_back(pop_ev(0, live[i]));
          live.erase(live.begin() + static_cast<std::ptrdiff_t>(i));
        }
        const auto got = legal_set_oracle(trace, d);
        REQUIRE(got == brute_legal(trace, d));
        REQUIRE((live.empty() || !got.empty()));
      }
    }
  }
}

TEST_CASE("oracle rejects duplicate ids and pops of dead items") {
  RelaxationOracle oracle(Discipline::central_k);
  oracle.on_push(0, 7, 1.0, 2);
  CHECK_THROWS_AS(oracle.on_push(0, 7, 2.0, 2), std::invalid_argument);
  oracle.on_pop(7);
  CHECK_THROWS_AS(oracle.on_pop(7), std::invalid_argument);
  CHECK_THROWS_AS(oracle.on_pop(99), std::invalid_argument);
  CHECK(!oracle.live(7));
  CHECK(oracle.live_count() == 0);
}

TEST_CASE("sequential audit passes the central backend") {
  AuditTuning uniform;
  uniform.k_mix = {8};
  {
    CentralBackend b(4, 32, 9);
    const auto r = sequential_audit(b, Discipline::central_k, 100000, 9,
                                    uniform);
    CHECK(r.pass);
    CHECK(r.counterexample.empty());
    CHECK(r.pops_succeeded > 10000);
  }
  AuditTuning mixed;
  mixed.k_mix = {1, 4, 16};
  {
    CentralBackend b(4, 32, 10);
    const auto r =
        sequential_audit(b, Discipline::central_k, 100000, 10, mixed);
    CHECK(r.pass);
    CHECK(r.pops_succeeded > 10000);
  }
}

TEST_CASE("sequential audit passes the hybrid backend with mixed windows") {
  AuditTuning mixed;
  mixed.k_mix = {0, 1, 4, 16};
  HybridBackend b(4, 32, 11);
  const auto r =
      sequential_audit(b, Discipline::hybrid_per_place_k, 100000, 11, mixed);
  CHECK(r.pass);
  CHECK(r.pops_succeeded > 10000);
}

TEST_CASE("a one-too-wide window is caught with a counterexample") {
  AuditTuning bias;
  bias.k_mix = {0, 1, 4};
  bias.backend_k_bias = 1;
  {
    CentralBackend b(4, 32, 12);
    const auto r =
        sequential_audit(b, Discipline::central_k, 100000, 12, bias);
    REQUIRE(!r.pass);
    CHECK(!r.failure.empty());
    REQUIRE(!r.counterexample.empty());
    const TraceEvent& last = r.counterexample.back();
    CHECK(!last.is_push);
    CHECK(last.result != kNoPopResult);
    // Counterexamples serialize for replay: header plus one row per event.
    const std::string csv = trace_to_csv(r.counterexample);
    CHECK(csv.rfind("op,place,id,key,k,result,timestamp\n", 0) == 0);
    CHECK(static_cast<std::size_t>(
              std::count(csv.begin(), csv.end(), '\n')) ==
          r.counterexample.size() + 1);
  }
  {
    HybridBackend b(4, 32, 12);
    const auto r = sequential_audit(b, Discipline::hybrid_per_place_k, 100000,
                                    12, bias);
    REQUIRE(!r.pass);
    CHECK(!r.counterexample.empty());
    CHECK(!r.counterexample.back().is_push);
  }
}

TEST_CASE("audit tuning is validated") {
  CentralBackend b(2, 32, 1);
  AuditTuning bad;
  bad.k_mix = {};
  CHECK_THROWS_AS(sequential_audit(b, Discipline::central_k, 10, 1, bad),
                  std::invalid_argument);
  bad.k_mix = {1};
  bad.push_prob = 1.5;
  CHECK_THROWS_AS(sequential_audit(b, Discipline::central_k, 10, 1, bad),
                  std::invalid_argument);
}

TEST_CASE("concurrent stress keeps exactly-once consumption") {
  for (BackendKind kind :
       {BackendKind::ws, BackendKind::central, BackendKind::hybrid}) {
    StressOptions o;
    o.kind = kind;
    o.places = 4;
    o.tasks = 100000;
    o.seed = 3;
    const auto r = concurrent_stress(o);
    CHECK(r.pass);
    CHECK(r.pushed == o.tasks);
    CHECK(r.consumed == o.tasks);
    CHECK(r.duplicates == 0);
    CHECK(r.missing == 0);
  }
}

TEST_CASE("a frozen worker does not block the drain") {
  for (BackendKind kind : {BackendKind::central, BackendKind::hybrid}) {
    StressOptions o;
    o.kind = kind;
    o.places = 4;
    o.tasks = 100000;
    o.seed = 5;
    o.freeze_one = true;
    const auto r = concurrent_stress(o);
    CHECK(r.pass);
    CHECK(r.consumed == o.tasks);
  }
}

TEST_CASE("stress options are validated") {
  StressOptions o;
  o.places = 1;
  CHECK_THROWS_AS(concurrent_stress(o), std::invalid_argument);
  o.places = 4;
  o.tasks = 2;
  CHECK_THROWS_AS(concurrent_stress(o), std::invalid_argument);
  o.tasks = 100;
  o.k_mix = {};
  CHECK_THROWS_AS(concurrent_stress(o), std::invalid_argument);
}

TEST_CASE("spying leaves the victim's list content untouched") {
  HybridBackend b(2, 16, 7);
  Rng rng(7);
  const std::uint32_t ks[] = {0, 4, 16};
  for (std::uint64_t i = 0; i < 3000; ++i) {
    Task t;
    t.key = rng.unit() * 10.0;
    t.id = i;
    t.k = ks[rng.bounded(3)];
    b.push(0, t.k, t);
  }
  const std::uint64_t sum0 = b.debug_local_checksum(0);
  const std::uint64_t spies0 = b.steals_or_spies();
  std::uint64_t consumed = 0;
  for (int i = 0; i < 10000; ++i) {
    if (b.pop(1)) ++consumed;
    if (i % 500 == 0) CHECK(b.debug_local_checksum(0) == sum0);
  }
  CHECK(b.debug_local_checksum(0) == sum0);
  CHECK(b.steals_or_spies() > spies0);
  CHECK(consumed > 0);
  CHECK(b.debug_appended_count(0) == 3000);
}
