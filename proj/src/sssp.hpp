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
#ifndef KPRIO_SSSP_HPP
#define KPRIO_SSSP_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "backend.hpp"
#include "graph.hpp"
#include "task.hpp"

namespace kprio {

constexpr std::uint32_t kRandomSource = 0xffffffffu;

struct SsspOptions {
  BackendKind backend = BackendKind::ws;
  std::uint32_t places = 1;
  std::uint32_t k = 64;
  std::uint64_t seed = 1;
  std::uint32_t source = kRandomSource;  // chosen uniformly from the seed
  std::uint64_t budget_ms = 120000;      // 0 disables the watchdog
};

struct SsspResult {
  std::vector<double> dist;
  std::uint32_t source = 0;
  double wall_ms = 0.0;
  bool timed_out = false;
  std::uint64_t relaxations = 0;  // tasks executed
  std::uint64_t dead_tasks = 0;   // tasks dropped by the staleness hook
  std::uint64_t pushes = 0;
  std::uint64_t pops = 0;
  std::uint64_t steals_or_spies = 0;
};

// Factory shared by the solver, the CLI and the harnesses. k_max is raised
// to cover the requested k when a run sweeps beyond the default bound.
std::unique_ptr<Backend> make_backend(BackendKind kind, std::uint32_t places,
                                      std::uint32_t k_max, std::uint64_t seed);

SsspResult run_sssp(const Graph& g, const SsspOptions& opts);

}  // namespace kprio

#endif
