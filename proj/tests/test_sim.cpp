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
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dijkstra.hpp"
#include "graph.hpp"
#include "phase_sim.hpp"
#include "rng.hpp"

using namespace kprio;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t reachable_count(const std::vector<double>& dist) {
  std::uint64_t c = 0;
  for (double d : dist)
    if (d < kInf) ++c;
  return c;
}

// Synchronous relaxation rounds: every round recomputes all candidates from
// the previous round's snapshot. Returns the index of the first round that
// changes nothing, i.e. the round count needed to confirm the fixpoint.
std::uint64_t bellman_ford_rounds(const Graph& g, std::uint32_t s,
                                  std::vector<double>* final_out) {
  std::vector<double> d(g.n, kInf);
  d[s] = 0.0;
  std::uint64_t rounds = 0;
  for (;;) {
    ++rounds;
    std::vector<double> nd = d;
    for (std::uint32_t u = 0; u < g.n; ++u) {
      if (!(d[u] < kInf)) continue;
      for (std::uint64_t i = g.offset[u]; i < g.offset[u + 1]; ++i) {
        const double cd = d[u] + g.wgt[i];
        if (cd < nd[g.adj[i]]) nd[g.adj[i]] = cd;
      }
    }
    if (nd == d) break;
    d.swap(nd);
  }
  if (final_out) *final_out = d;
  return rounds;
}

bool same_metrics(const PhaseMetrics& a, const PhaseMetrics& b) {
  return a.relaxed == b.relaxed && a.settled == b.settled &&
         a.useless == b.useless && a.h_star == b.h_star &&
         a.active_size == b.active_size && a.bound_useless == b.bound_useless;
}

}  // namespace

TEST_CASE("single relaxation per phase is exact shortest-path extraction") {
  // With one relaxation per phase the globally best active node is chosen
  // every time, and holding out newest nodes cannot hide it.
  const Graph g = Graph::erdos_renyi(60, 0.2, 11);
  const std::uint32_t s = 7;
  const auto oracle = dijkstra(g, s);
  for (std::uint32_t rho : {0u, 17u}) {
    const auto r = simulate(g, s, 1, rho, 99);
    CHECK(r.phases.size() == reachable_count(oracle));
    for (const auto& pm : r.phases) {
      CHECK(pm.relaxed == 1);
      CHECK(pm.settled == 1);
      CHECK(pm.useless == 0);
      CHECK(pm.h_star == 0.0);
    }
    CHECK(r.total_useless == 0);
    REQUIRE(r.dist.size() == oracle.size());
    for (std::uint32_t v = 0; v < g.n; ++v) CHECK(r.dist[v] == oracle[v]);
  }
}

TEST_CASE("relaxing the whole frontier reproduces synchronous rounds") {
  for (std::uint64_t seed : {3ull, 4ull, 5ull}) {
    const Graph g = Graph::erdos_renyi(40, 0.25, seed);
    const std::uint32_t s = Rng(seed).bounded(40);
    std::vector<double> bf;
    const std::uint64_t rounds = bellman_ford_rounds(g, s, &bf);
    const auto r = simulate(g, s, g.n, 0, 1);
    CHECK(r.phases.size() == rounds);
    for (std::uint32_t v = 0; v < g.n; ++v) CHECK(r.dist[v] == bf[v]);
    const auto oracle = dijkstra(g, s);
    for (std::uint32_t v = 0; v < g.n; ++v) CHECK(r.dist[v] == oracle[v]);
  }
}

TEST_CASE("two-node micro graph settles in two phases") {
  const Graph g = Graph::from_edges(2, {{0, 1, 0.5}});
  const auto r = simulate(g, 0, 1, 0, 1);
  REQUIRE(r.phases.size() == 2);
  CHECK(r.dist[0] == 0.0);
  CHECK(r.dist[1] == 0.5);
  CHECK(r.total_relaxed == 2);
}

TEST_CASE("identical arguments give identical runs") {
  const Graph g = Graph::erdos_renyi(80, 0.15, 21);
  const auto a = simulate(g, 3, 6, 12, 777);
  const auto b = simulate(g, 3, 6, 12, 777);
  REQUIRE(a.phases.size() == b.phases.size());
  for (std::size_t i = 0; i < a.phases.size(); ++i)
    CHECK(same_metrics(a.phases[i], b.phases[i]));
  CHECK(a.dist == b.dist);
  CHECK(a.total_relaxed == b.total_relaxed);
}

TEST_CASE("active-array ordering breaks distance ties by node id") {
  CHECK(phase_order_before(5.0, 3, 5.0, 7));
  CHECK_FALSE(phase_order_before(5.0, 7, 5.0, 3));
  CHECK(phase_order_before(4.0, 9, 5.0, 1));
  CHECK_FALSE(phase_order_before(5.0, 1, 4.0, 9));
}

TEST_CASE("holding out nearly everything still converges to the oracle") {
  // rho far above the active count forces the short-array path: every phase
  // relaxes the best node plus a random sample of held-out nodes.
  const Graph g = Graph::erdos_renyi(70, 0.18, 31);
  const std::uint32_t s = 5;
  const auto oracle = dijkstra(g, s);
  const auto r = simulate(g, s, 5, 1000, 123);
  for (std::uint32_t v = 0; v < g.n; ++v) CHECK(r.dist[v] == oracle[v]);
  for (const auto& pm : r.phases) {
    CHECK(pm.relaxed >= 1);
    CHECK(pm.relaxed <= 5);
    CHECK(pm.settled + pm.useless == pm.relaxed);
  }
  CHECK(r.total_relaxed >= reachable_count(oracle));
}

TEST_CASE("mixed settings converge to the oracle with sane metrics") {
  const Graph g = Graph::erdos_renyi(90, 0.12, 47);
  const std::uint32_t s = Rng(47).bounded(90);
  const auto oracle = dijkstra(g, s);
  struct Cfg {
    std::uint32_t procs, rho;
  };
  for (Cfg c : {Cfg{4, 0}, Cfg{4, 8}, Cfg{16, 64}, Cfg{90, 16}}) {
    const auto r = simulate(g, s, c.procs, c.rho, 2024);
    for (std::uint32_t v = 0; v < g.n; ++v) CHECK(r.dist[v] == oracle[v]);
    std::uint64_t relaxed = 0, useless = 0;
    for (const auto& pm : r.phases) {
      CHECK(pm.settled + pm.useless == pm.relaxed);
      CHECK(pm.relaxed <= c.procs);
      CHECK(pm.active_size >= 1);
      CHECK(pm.h_star >= 0.0);
      CHECK(std::isfinite(pm.bound_useless));
      CHECK(pm.bound_useless >= 0.0);
      CHECK(pm.bound_useless <=
            static_cast<double>(pm.relaxed) + 1e-9);
      relaxed += pm.relaxed;
      useless += pm.useless;
    }
    CHECK(relaxed == r.total_relaxed);
    CHECK(useless == r.total_useless);
    CHECK(r.total_relaxed >= reachable_count(oracle));
  }
}

TEST_CASE("observer sees ordered candidates and tentative distances never "
          "increase") {
  const Graph g = Graph::erdos_renyi(80, 0.15, 61);
  std::vector<double> seen(g.n, kInf);
  std::uint64_t expect_phase = 0;
  bool ok_order = true, ok_ranks = true, ok_monotone = true;
  PhaseObserver obs = [&](const PhaseObservation& o) {
    CHECK(o.phase == expect_phase);
    ++expect_phase;
    const auto& cand = *o.candidates;
    REQUIRE(!cand.empty());
    CHECK(cand.size() <= 8 + 24);
    for (std::size_t i = 1; i < cand.size(); ++i)
      ok_order = ok_order &&
                 phase_order_before(cand[i - 1].first, cand[i - 1].second,
                                    cand[i].first, cand[i].second);
    const auto& ranks = *o.relaxed_ranks;
    REQUIRE(!ranks.empty());
    for (std::size_t i = 0; i < ranks.size(); ++i) {
      ok_ranks = ok_ranks && ranks[i] < cand.size();
      if (i > 0) ok_ranks = ok_ranks && ranks[i] > ranks[i - 1];
    }
    for (const auto& [d, v] : cand) {
      ok_monotone = ok_monotone && !(d > seen[v]);
      seen[v] = d;
    }
  };
  const auto r = simulate(g, 2, 8, 24, 55, obs);
  CHECK(expect_phase == r.phases.size());
  CHECK(ok_order);
  CHECK(ok_ranks);
  CHECK(ok_monotone);
}

TEST_CASE("simulate validates its arguments") {
  const Graph g = Graph::from_edges(2, {{0, 1, 0.5}});
  CHECK_THROWS_AS(simulate(g, 2, 1, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(simulate(g, 0, 0, 0, 1), std::invalid_argument);
}
