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
#include "phase_sim.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dijkstra.hpp"
#include "rng.hpp"
#include "theory.hpp"

namespace kprio {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

SimResult simulate(const Graph& g, std::uint32_t source,
                   std::uint32_t num_procs, std::uint32_t rho,
                   std::uint64_t seed, const PhaseObserver& observer) {
  if (g.n == 0) throw std::invalid_argument("simulate: empty graph");
  if (source >= g.n)
    throw std::invalid_argument("simulate: source out of range");
  if (num_procs < 1)
    throw std::invalid_argument("simulate: need num_procs >= 1");

  const std::uint32_t n = g.n;
  const std::size_t procs = num_procs;
  const double density = g.density();
  const std::vector<double> oracle = dijkstra(g, source);

  Rng rng(seed);
  std::vector<double> delta(n, kInf);
  std::vector<std::uint64_t> node_seq(n, 0);
  std::vector<char> is_active(n, 0);
  std::uint64_t next_seq = 1;

  delta[source] = 0.0;
  is_active[source] = 1;
  node_seq[source] = next_seq++;
  std::vector<std::uint32_t> actives{source};

  // Per-phase scratch, epoch-stamped so nothing needs an O(n) clear.
  std::vector<std::uint64_t> held_mark(n, 0);
  std::vector<std::uint64_t> relaxed_mark(n, 0);
  std::vector<std::uint64_t> best_mark(n, 0);
  std::vector<double> best(n, 0.0);
  std::uint64_t epoch = 0;

  std::vector<std::pair<double, std::uint32_t>> sorted;   // (delta, node)
  std::vector<std::pair<std::uint64_t, std::uint32_t>> by_seq;
  std::vector<std::uint32_t> held_list;
  std::vector<std::uint32_t> relaxed_list;
  std::vector<std::pair<double, std::uint32_t>> cand;
  std::vector<std::uint32_t> ranks;
  std::vector<std::uint32_t> touched;  // nodes improved this phase
  std::vector<std::uint32_t> newly;    // subset of touched: were inactive
  std::vector<std::uint32_t> next_actives;

  SimResult res;
  res.source = source;

  std::uint64_t t = 0;
  while (!actives.empty()) {
    if (t >= 10ull * n)
      throw std::runtime_error("simulate: phase budget exceeded");
    ++epoch;
    const std::size_t alpha = actives.size();

    sorted.clear();
    for (std::uint32_t v : actives) sorted.emplace_back(delta[v], v);
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
      return phase_order_before(a.first, a.second, b.first, b.second);
    });
    const std::uint32_t best_node = sorted.front().second;

    // The rho newest actives sit this phase out, except the globally best
    // node, which always stays relaxable.
    held_list.clear();
    if (rho > 0) {
      by_seq.clear();
      for (std::uint32_t v : actives) by_seq.emplace_back(node_seq[v], v);
      std::sort(by_seq.begin(), by_seq.end(),
                [](const auto& a, const auto& b) { return a.first > b.first; });
      const std::size_t newest = std::min<std::size_t>(rho, by_seq.size());
      for (std::size_t i = 0; i < newest; ++i) {
        const std::uint32_t v = by_seq[i].second;
        if (v == best_node) continue;
        held_mark[v] = epoch;
        held_list.push_back(v);
      }
    }
    const std::size_t array_size = alpha - held_list.size();

    // Relax the best P array nodes; a short array is topped up with a
    // uniform without-replacement sample of the held-out nodes.
    relaxed_list.clear();
    for (const auto& [d, v] : sorted) {
      if (held_mark[v] == epoch) continue;
      relaxed_list.push_back(v);
      if (relaxed_list.size() == procs) break;
    }
    if (array_size < procs && !held_list.empty()) {
      const std::size_t need =
          std::min(procs - array_size, held_list.size());
      for (std::size_t i = 0; i < need; ++i) {
        const std::size_t j =
            i + static_cast<std::size_t>(rng.bounded(held_list.size() - i));
        std::swap(held_list[i], held_list[j]);
        relaxed_list.push_back(held_list[i]);
      }
    }
    for (std::uint32_t v : relaxed_list) relaxed_mark[v] = epoch;

    // Candidates for the work bound: the min(P + rho, alpha) best actives.
    // Every relaxed node lands in this prefix: at most P - 1 better array
    // nodes plus at most rho held-out nodes can precede it, and short-array
    // fills only happen when the prefix is the whole active set.
    const std::size_t cand_count =
        std::min(procs + static_cast<std::size_t>(rho), alpha);
    cand.assign(sorted.begin(),
                sorted.begin() + static_cast<std::ptrdiff_t>(cand_count));
    ranks.clear();
    for (std::size_t idx = 0; idx < cand_count; ++idx)
      if (relaxed_mark[cand[idx].second] == epoch)
        ranks.push_back(static_cast<std::uint32_t>(idx));
    if (ranks.size() != relaxed_list.size())
      throw std::logic_error("simulate: relaxed node outside candidate set");

    if (observer) {
      PhaseObservation obs;
      obs.phase = t;
      obs.candidates = &cand;
      obs.relaxed_ranks = &ranks;
      observer(obs);
    }

    BoundInput bin;
    bin.n = n;
    bin.p = density;
    bin.d.reserve(cand_count);
    for (const auto& [d, v] : cand) bin.d.push_back(d);
    bin.ranks = ranks;
    const BoundOutput bout = useless_work_bound(bin);

    PhaseMetrics pm;
    pm.relaxed = relaxed_list.size();
    pm.active_size = alpha;
    pm.bound_useless = bout.w_upper;
    double dmin = kInf;
    double dmax = -kInf;
    for (std::uint32_t v : relaxed_list) {
      if (delta[v] == oracle[v]) pm.settled += 1;
      dmin = std::min(dmin, delta[v]);
      dmax = std::max(dmax, delta[v]);
    }
    pm.useless = pm.relaxed - pm.settled;
    pm.h_star = dmax - dmin;

    // Synchronous relaxation: all candidates come from the phase-start
    // snapshot; delta stays untouched until the scan is complete.
    touched.clear();
    for (std::uint32_t u : relaxed_list) {
      const double du = delta[u];
      for (std::uint64_t i = g.offset[u]; i < g.offset[u + 1]; ++i) {
        const std::uint32_t v = g.adj[i];
        const double cd = du + g.wgt[i];
        if (best_mark[v] != epoch) {
          if (cd < delta[v]) {
            best_mark[v] = epoch;
            best[v] = cd;
            touched.push_back(v);
          }
        } else if (cd < best[v]) {
          best[v] = cd;
        }
      }
    }

    newly.clear();
    for (std::uint32_t v : touched) {
      delta[v] = best[v];
      if (!is_active[v]) {
        is_active[v] = 1;
        newly.push_back(v);
      }
    }
    // A relaxed node leaves the active set unless this very phase improved
    // it again (then it counts as newly created and stays).
    for (std::uint32_t u : relaxed_list)
      if (best_mark[u] != epoch) is_active[u] = 0;

    next_actives.clear();
    for (std::uint32_t v : actives)
      if (is_active[v]) next_actives.push_back(v);
    for (std::uint32_t v : newly) next_actives.push_back(v);
    actives.swap(next_actives);

    // Every updated node re-enters as newly created: canonical id order,
    // one shuffle, then ascending sequence ids.
    std::sort(touched.begin(), touched.end());
    for (std::size_t i = touched.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng.bounded(i));
      std::swap(touched[i - 1], touched[j]);
    }
    for (std::uint32_t v : touched) node_seq[v] = next_seq++;

    res.phases.push_back(pm);
    res.total_relaxed += pm.relaxed;
    res.total_useless += pm.useless;
    ++t;
  }

  res.dist = std::move(delta);
  return res;
}

}  // namespace kprio
