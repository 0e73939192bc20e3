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
#ifndef KPRIO_DIJKSTRA_HPP
#define KPRIO_DIJKSTRA_HPP

#include <cstdint>
#include <vector>

#include "graph.hpp"

namespace kprio {

// Reference single-source shortest paths. Unreachable nodes get +infinity.
// Candidate distances are formed as dist[u] + w in a single IEEE addition,
// the same expression the concurrent solver uses, so agreeing runs agree
// bit for bit.
std::vector<double> dijkstra(const Graph& g, std::uint32_t source);

}  // namespace kprio

#endif
