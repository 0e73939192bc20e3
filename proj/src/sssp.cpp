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
#include "sssp.hpp"

#include <atomic>
#include <bit>
#include <limits>
#include <stdexcept>

#include "central_backend.hpp"
#include "hybrid_backend.hpp"
#include "rng.hpp"
#include "scheduler.hpp"
#include "ws_backend.hpp"

namespace kprio {
namespace {

// Distances live in atomics as raw IEEE bits. All values are non-negative
// (0, positive finite, +inf), for which the bit patterns order exactly like
// the doubles, so min-CAS loops can compare the integers directly.
std::uint64_t bits_of(double d) { return std::bit_cast<std::uint64_t>(d); }

struct SsspEnv {
  const Graph* g = nullptr;
  std::atomic<std::uint64_t>* dist = nullptr;
  std::uint32_t k = 0;
  std::atomic<std::uint64_t> relaxations{0};
};

bool relax_live(const void* env, const Task& t) {
  auto* e = static_cast<const SsspEnv*>(env);
  return e->dist[t.a].load(std::memory_order_relaxed) == bits_of(t.key);
}

void relax_fn(TaskContext& ctx, const Task& t) {
  auto* e = static_cast<SsspEnv*>(t.env);
  // A task is a snapshot of dist[node] at spawn time; if the node improved
  // since, this snapshot is dead.
  if (e->dist[t.a].load(std::memory_order_relaxed) != bits_of(t.key)) return;
  e->relaxations.fetch_add(1, std::memory_order_relaxed);
  const Graph& g = *e->g;
  const std::uint32_t u = static_cast<std::uint32_t>(t.a);
  for (std::uint64_t i = g.offset[u]; i < g.offset[u + 1]; ++i) {
    const std::uint32_t v = g.adj[i];
    const double nd = t.key + g.wgt[i];
    const std::uint64_t ndb = bits_of(nd);
    std::uint64_t cur = e->dist[v].load(std::memory_order_relaxed);
    bool improved = false;
    while (ndb < cur) {
      if (e->dist[v].compare_exchange_weak(cur, ndb, std::memory_order_relaxed)) {
        improved = true;
        break;
      }
    }
    if (improved) {
      Task child;
      child.key = nd;
      child.k = e->k;
      child.a = v;
      child.env = e;
      child.fn = relax_fn;
      child.live = relax_live;
      ctx.spawn(child);
    }
  }
}

}  // namespace

std::unique_ptr<Backend> make_backend(BackendKind kind, std::uint32_t places,
                                      std::uint32_t k_max, std::uint64_t seed) {
  switch (kind) {
    case BackendKind::ws:
      return std::make_unique<WsBackend>(places, seed);
    case BackendKind::central:
      return std::make_unique<CentralBackend>(places, k_max, seed,
                                              std::max(4096u, k_max));
    case BackendKind::hybrid:
      return std::make_unique<HybridBackend>(places, k_max, seed);
  }
  throw std::invalid_argument("unknown backend kind");
}

SsspResult run_sssp(const Graph& g, const SsspOptions& opts) {
  if (g.n == 0) throw std::invalid_argument("empty graph");
  if (opts.places < 1) throw std::invalid_argument("need at least one place");
  std::uint32_t src = opts.source;
  if (src == kRandomSource) {
    Rng r(opts.seed);
    src = static_cast<std::uint32_t>(r.bounded(g.n));
  }
  if (src >= g.n) throw std::invalid_argument("source node out of range");

  std::vector<std::atomic<std::uint64_t>> dist(g.n);
  const std::uint64_t inf = bits_of(std::numeric_limits<double>::infinity());
  for (auto& d : dist) d.store(inf, std::memory_order_relaxed);
  dist[src].store(bits_of(0.0), std::memory_order_relaxed);

  SsspEnv env;
  env.g = &g;
  env.dist = dist.data();
  env.k = opts.k;

  const std::uint32_t k_max = std::max(512u, opts.k);
  auto backend = make_backend(opts.backend, opts.places, k_max, opts.seed);
  SchedulerConfig cfg;
  cfg.places = opts.places;
  cfg.k_max = k_max;
  cfg.seed = opts.seed;
  cfg.budget_ms = opts.budget_ms;
  Scheduler sched(cfg, *backend);

  Task root;
  root.key = 0.0;
  root.k = opts.k;
  root.a = src;
  root.env = &env;
  root.fn = relax_fn;
  root.live = relax_live;
  RunResult rr = sched.run(root);

  SsspResult out;
  out.dist.resize(g.n);
  for (std::uint32_t i = 0; i < g.n; ++i)
    out.dist[i] = std::bit_cast<double>(dist[i].load(std::memory_order_relaxed));
  out.source = src;
  out.wall_ms = rr.wall_ms;
  out.timed_out = rr.timed_out;
  out.relaxations = env.relaxations.load(std::memory_order_relaxed);
  out.dead_tasks = rr.stats.dead_tasks_eliminated;
  out.pushes = rr.stats.pushes;
  out.pops = rr.stats.pops;
  out.steals_or_spies = rr.stats.steals_or_spies;
  return out;
}

}  // namespace kprio
