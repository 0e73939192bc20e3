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

#include <cstdint>
#include <limits>
#include <vector>

#include "dijkstra.hpp"
#include "graph.hpp"
#include "rng.hpp"
#include "sssp.hpp"

using namespace kprio;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Fixpoint relaxation over full edge scans; the slowest possible oracle but
// hard to get wrong. Candidates use the same dist[u] + w expression as the
// heap solver, so matching runs match bitwise.
std::vector<double> bellman_ford(const Graph& g, std::uint32_t s) {
  std::vector<double> d(g.n, kInf);
  d[s] = 0.0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::uint32_t u = 0; u < g.n; ++u) {
      if (!(d[u] < kInf)) continue;
      for (std::uint64_t i = g.offset[u]; i < g.offset[u + 1]; ++i) {
        const double cd = d[u] + g.wgt[i];
        if (cd < d[g.adj[i]]) {
          d[g.adj[i]] = cd;
          changed = true;
        }
      }
    }
  }
  return d;
}

}  // namespace

TEST_CASE("reference solver agrees with fixpoint relaxation bit for bit") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Graph g = Graph::erdos_renyi(30, 0.3, seed);
    const std::uint32_t s = Rng(seed).bounded(30);
    const auto a = dijkstra(g, s);
    const auto b = bellman_ford(g, s);
    REQUIRE(a.size() == b.size());
    for (std::uint32_t v = 0; v < g.n; ++v) CHECK(a[v] == b[v]);
  }
}

TEST_CASE("parallel solver matches the reference exactly on every backend") {
  const Graph g = Graph::erdos_renyi(200, 0.05, 71);
  for (BackendKind kind :
       {BackendKind::ws, BackendKind::central, BackendKind::hybrid}) {
    for (std::uint32_t places : {1u, 4u}) {
      for (std::uint32_t k : {1u, 64u}) {
        SsspOptions opts;
        opts.backend = kind;
        opts.places = places;
        opts.k = k;
        opts.seed = 1000 + k;
        const SsspResult r = run_sssp(g, opts);
        REQUIRE_FALSE(r.timed_out);
        const auto oracle = dijkstra(g, r.source);
        REQUIRE(r.dist.size() == oracle.size());
        for (std::uint32_t v = 0; v < g.n; ++v) CHECK(r.dist[v] == oracle[v]);
        // Quiescence accounting: every pushed task was either executed or
        // dropped dead.
        CHECK(r.pushes == r.pops + r.dead_tasks);
        CHECK(r.relaxations >= 1);
      }
    }
  }
}

TEST_CASE("source selection is deterministic per seed and respects overrides") {
  const Graph g = Graph::erdos_renyi(100, 0.1, 17);
  SsspOptions opts;
  opts.backend = BackendKind::ws;
  opts.seed = 5;
  const auto a = run_sssp(g, opts);
  const auto b = run_sssp(g, opts);
  CHECK(a.source == b.source);
  CHECK(a.source == Rng(5).bounded(100));
  CHECK(a.dist == b.dist);

  opts.source = 42;
  const auto c = run_sssp(g, opts);
  CHECK(c.source == 42);
  CHECK(c.dist[42] == 0.0);
}

TEST_CASE("relaxation count at least covers the reachable set") {
  const Graph g = Graph::erdos_renyi(150, 0.08, 23);
  SsspOptions opts;
  opts.backend = BackendKind::central;
  opts.places = 4;
  opts.k = 16;
  opts.seed = 9;
  const auto r = run_sssp(g, opts);
  REQUIRE_FALSE(r.timed_out);
  std::uint64_t reachable = 0;
  for (double d : r.dist)
    if (d < kInf) ++reachable;
  CHECK(r.relaxations >= reachable);
  CHECK(reachable >= 2);
}
