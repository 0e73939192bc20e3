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
#ifndef KPRIO_PHASE_SIM_HPP
#define KPRIO_PHASE_SIM_HPP

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "graph.hpp"

namespace kprio {

// Deterministic phase model of priority-relaxed parallel shortest paths.
// Each phase relaxes up to P of the best active nodes while the rho newest
// actives sit out (the globally best node never sits out), applies all
// distance updates synchronously from the phase-start snapshot, and gives
// every updated node a fresh sequence id.

struct PhaseMetrics {
  std::uint64_t relaxed = 0;      // nodes relaxed this phase
  std::uint64_t settled = 0;      // relaxed at their final distance already
  std::uint64_t useless = 0;      // relaxed - settled
  double h_star = 0.0;            // max - min tentative distance of relaxed
  std::uint64_t active_size = 0;  // actives at phase start, held-out included
  double bound_useless = 0.0;     // expected-useless upper bound for the step
};

// Per-phase snapshot handed to an observer before updates are applied.
// Pointers stay valid only during the callback.
struct PhaseObservation {
  std::uint64_t phase = 0;
  // Best min(P + rho, active) actives as (distance, node), ascending with
  // ties broken by node id.
  const std::vector<std::pair<double, std::uint32_t>>* candidates = nullptr;
  // Indices into candidates of the nodes relaxed this phase, ascending.
  const std::vector<std::uint32_t>* relaxed_ranks = nullptr;
};
using PhaseObserver = std::function<void(const PhaseObservation&)>;

struct SimResult {
  std::vector<PhaseMetrics> phases;
  std::vector<double> dist;  // final tentative distances, +inf if unreachable
  std::uint32_t source = 0;
  std::uint64_t total_relaxed = 0;
  std::uint64_t total_useless = 0;
};

// Ordering of the active array: distance ascending, node id breaking ties.
inline bool phase_order_before(double da, std::uint32_t a, double db,
                               std::uint32_t b) {
  if (da != db) return da < db;
  return a < b;
}

// Runs the model to quiescence. Requires a valid graph, source < g.n and
// num_procs >= 1; throws std::invalid_argument otherwise. Identical
// arguments give identical results.
SimResult simulate(const Graph& g, std::uint32_t source,
                   std::uint32_t num_procs, std::uint32_t rho,
                   std::uint64_t seed, const PhaseObserver& observer = {});

}  // namespace kprio

#endif
