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
#ifndef KPRIO_GRAPH_HPP
#define KPRIO_GRAPH_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace kprio {

struct Edge {
  std::uint32_t u;
  std::uint32_t v;
  double w;
};

// Undirected weighted graph in CSR form (each edge stored in both rows).
struct Graph {
  std::uint32_t n = 0;
  std::uint64_t m = 0;  // undirected edge count
  std::vector<std::uint64_t> offset;  // n + 1 entries
  std::vector<std::uint32_t> adj;     // 2m entries
  std::vector<double> wgt;            // 2m entries

  // G(n, p) with i.i.d. uniform weights in (0, 1]. Requires 0 < p <= 1 and
  // p > 1.1 * ln(n) / n so the result is connected with high probability.
  static Graph erdos_renyi(std::uint32_t n, double p, std::uint64_t seed);
  static Graph from_edges(std::uint32_t n, const std::vector<Edge>& edges);

  // Text format: one header line "n m", then m lines "u v w" with u < v and
  // w printed with enough digits to round-trip exactly.
  void save(const std::string& path) const;
  static Graph load(const std::string& path);

  double density() const {
    if (n < 2) return 0.0;
    return 2.0 * static_cast<double>(m) / (static_cast<double>(n) * (n - 1));
  }
};

}  // namespace kprio

#endif
