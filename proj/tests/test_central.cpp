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

#include <vector>

#include "central_backend.hpp"

using namespace kprio;

namespace {
Task mk(double key, std::uint64_t id) {
  Task t;
  t.key = key;
  t.id = id;
  return t;
}
}  // namespace

TEST_CASE("k=1 pushes fill consecutive slots and leave tail one behind") {
  CentralBackend q(2, 16, 1);
  for (int i = 0; i < 8; ++i) q.push(0, 1, mk(i, 100 + i));
  // Each k=1 window holds one slot, so push i lands at slot i and the tail
  // only advances when the next push finds the window occupied.
  CHECK(q.debug_tail() == 7);
  CHECK(q.debug_push_count() == 8);
  for (int i = 0; i < 8; ++i) {
    auto pos = q.debug_live_pos_of(100 + i);
    REQUIRE(pos.has_value());
    CHECK(*pos == static_cast<std::uint64_t>(i));
  }
}

TEST_CASE("k-window keeps an item within k slots of the tail at insert time") {
  CentralBackend q(2, 16, 7);
  q.push(0, 4, mk(1.0, 50));
  auto pos = q.debug_live_pos_of(50);
  REQUIRE(pos.has_value());
  CHECK(*pos < 4);
  CHECK(q.debug_tail() == 0);
}

TEST_CASE("owner sees its own pushes immediately") {
  CentralBackend q(2, 16, 3);
  q.push(0, 16, mk(2.5, 1));
  auto t = q.pop(0);
  REQUIRE(t.has_value());
  CHECK(t->key == 2.5);
  CHECK_FALSE(q.pop(0).has_value());
}

TEST_CASE("a small-k item is surfaced to other places once its budget passes") {
  CentralBackend q(2, 16, 11);
  // Place 0: y has k=1 and must not stay hidden once two more pushes land.
  q.push(0, 1, mk(1.0, 10));   // y
  q.push(0, 4, mk(9.0, 11));
  q.push(0, 4, mk(5.0, 12));
  // All three sit beyond tail (the first window was never exhausted), so a
  // plain scan at place 1 sees nothing; the deadline pass must surface y.
  auto t = q.pop(1);
  REQUIRE(t.has_value());
  CHECK(t->key == 1.0);
}

TEST_CASE("takes are exactly-once across places") {
  CentralBackend q(4, 16, 5);
  const int kPer = 64;
  std::vector<bool> seen(4 * kPer, false);
  for (int p = 0; p < 4; ++p)
    for (int i = 0; i < kPer; ++i)
      q.push(p, (i % 2) ? 1 : 8, mk(p * kPer + i, p * kPer + i));
  int got = 0;
  bool more = true;
  while (more) {
    more = false;
    for (PlaceId p = 0; p < 4; ++p) {
      auto t = q.pop(p);
      if (t) {
        REQUIRE_FALSE(seen[t->id]);
        seen[t->id] = true;
        ++got;
        more = true;
      }
    }
  }
  CHECK(got == 4 * kPer);
}

TEST_CASE("fully drained segments are recycled instead of growing the chain") {
  // Tiny segments (4 slots) force frequent turnover.
  CentralBackend q(1, 2, 3, 4);
  for (int i = 0; i < 16; ++i) q.push(0, 1, mk(i, i));
  CHECK(q.debug_segments_allocated() == 4);
  for (int i = 0; i < 16; ++i) {
    auto t = q.pop(0);
    REQUIRE(t.has_value());
    CHECK(t->key == double(i));
  }
  // Segments holding slots 0..11 were crossed and fully taken.
  CHECK(q.debug_segments_recycled() == 3);
  for (int i = 16; i < 32; ++i) q.push(0, 1, mk(i, i));
  // Recycled capacity covers slots 16..27; only one fresh segment is needed.
  CHECK(q.debug_segments_allocated() == 5);
  for (int i = 16; i < 32; ++i) {
    auto t = q.pop(0);
    REQUIRE(t.has_value());
    CHECK(t->key == double(i));
  }
  CHECK(q.debug_segments_recycled() == 7);
  CHECK_FALSE(q.pop(0).has_value());
}

TEST_CASE("owner pops drain in ascending key order") {
  CentralBackend q(2, 4, 9);
  for (double k : {0.7, 0.3, 0.9, 0.1, 0.5}) q.push(0, 1, mk(k, std::uint64_t(k * 10)));
  for (double want : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    auto t = q.pop(0);
    REQUIRE(t.has_value());
    CHECK(t->key == want);
  }
  CHECK_FALSE(q.pop(0).has_value());
}

TEST_CASE("foreign pops see everything below the tail, best-first") {
  CentralBackend q(2, 4, 9);
  // Five k=1 pushes leave the tail at 4: slots 0..3 are scan-visible to the
  // other place, the last item is not (its budget never fills afterwards).
  for (double k : {0.7, 0.3, 0.9, 0.1, 0.5}) q.push(0, 1, mk(k, std::uint64_t(k * 10)));
  for (double want : {0.1, 0.3, 0.7, 0.9}) {
    auto t = q.pop(1);
    REQUIRE(t.has_value());
    CHECK(t->key == want);
  }
  auto last = q.pop(0);
  REQUIRE(last.has_value());
  CHECK(last->key == 0.5);
}
