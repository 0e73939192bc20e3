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
#include "dijkstra.hpp"

#include <limits>
#include <queue>
#include <stdexcept>
#include <utility>

namespace kprio {

std::vector<double> dijkstra(const Graph& g, std::uint32_t source) {
  if (source >= g.n) throw std::invalid_argument("source node out of range");
  std::vector<double> dist(g.n, std::numeric_limits<double>::infinity());
  using Entry = std::pair<double, std::uint32_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> pq;
  dist[source] = 0.0;
  pq.emplace(0.0, source);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d != dist[u]) continue;  // stale entry
    for (std::uint64_t i = g.offset[u]; i < g.offset[u + 1]; ++i) {
      std::uint32_t v = g.adj[i];
      double cand = d + g.wgt[i];
      if (cand < dist[v]) {
        dist[v] = cand;
        pq.emplace(cand, v);
      }
    }
  }
  return dist;
}

}  // namespace kprio
