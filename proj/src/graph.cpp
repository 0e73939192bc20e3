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
#include "graph.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <stdexcept>

#include "rng.hpp"

namespace kprio {
namespace {

// Walks the linear index over ordered pairs (u, v), u < v, with geometric
// jumps so only accepted edges cost work. The visitor sees edges in
// lexicographic order; the RNG consumption is identical on every walk with
// the same seed, which lets CSR construction re-run the stream instead of
// buffering an edge list.
template <typename Visit>
void walk_pairs(std::uint32_t n, double p, std::uint64_t seed, Visit&& visit) {
  if (n < 2) return;
  Rng rng(seed);
  const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const double log1mp = (p < 1.0) ? std::log1p(-p) : 0.0;
  std::uint64_t idx = 0;       // next candidate pair
  std::uint64_t row_start = 0; // linear index of pair (u, u+1)
  std::uint32_t u = 0;
  for (;;) {
    if (p < 1.0) {
      double draw = std::log(rng.unit_pos()) / log1mp;
      if (draw >= static_cast<double>(total)) break;  // jumped past the end
      idx += static_cast<std::uint64_t>(draw);
    }
    if (idx >= total) break;
    while (idx >= row_start + (n - 1 - u)) {
      row_start += n - 1 - u;
      ++u;
    }
    std::uint32_t v = static_cast<std::uint32_t>(u + 1 + (idx - row_start));
    visit(u, v, rng.unit_pos());
    ++idx;
  }
}

void build_csr(Graph& g, const std::vector<Edge>& edges) {
  g.offset.assign(g.n + 1, 0);
  for (const Edge& e : edges) {
    ++g.offset[e.u + 1];
    ++g.offset[e.v + 1];
  }
  for (std::uint32_t i = 0; i < g.n; ++i) g.offset[i + 1] += g.offset[i];
  g.adj.resize(2 * g.m);
  g.wgt.resize(2 * g.m);
  std::vector<std::uint64_t> cur(g.offset.begin(), g.offset.end() - 1);
  for (const Edge& e : edges) {
    g.adj[cur[e.u]] = e.v;
    g.wgt[cur[e.u]++] = e.w;
    g.adj[cur[e.v]] = e.u;
    g.wgt[cur[e.v]++] = e.w;
  }
}

}  // namespace

Graph Graph::erdos_renyi(std::uint32_t n, double p, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("graph generation needs n >= 2");
  if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("edge probability must be in (0, 1]");
  double threshold = 1.1 * std::log(static_cast<double>(n)) / static_cast<double>(n);
  if (!(p > threshold))
    throw std::invalid_argument("edge probability too small for an almost-surely connected graph");

  Graph g;
  g.n = n;
  // Pass 1: count degrees (weights are drawn and dropped to keep the RNG
  // stream aligned with pass 2).
  std::vector<std::uint32_t> deg(n, 0);
  std::uint64_t m = 0;
  walk_pairs(n, p, seed, [&](std::uint32_t u, std::uint32_t v, double) {
    ++deg[u];
    ++deg[v];
    ++m;
  });
  g.m = m;
  g.offset.assign(n + 1, 0);
  for (std::uint32_t i = 0; i < n; ++i) g.offset[i + 1] = g.offset[i] + deg[i];
  g.adj.resize(2 * m);
  g.wgt.resize(2 * m);
  // Pass 2: identical walk, now filling both CSR rows per edge.
  std::vector<std::uint64_t> cur(g.offset.begin(), g.offset.end() - 1);
  walk_pairs(n, p, seed, [&](std::uint32_t u, std::uint32_t v, double w) {
    g.adj[cur[u]] = v;
    g.wgt[cur[u]++] = w;
    g.adj[cur[v]] = u;
    g.wgt[cur[v]++] = w;
  });
  return g;
}

Graph Graph::from_edges(std::uint32_t n, const std::vector<Edge>& edges) {
  Graph g;
  g.n = n;
  g.m = edges.size();
  for (const Edge& e : edges) {
    if (e.u >= e.v || e.v >= n) throw std::invalid_argument("edge endpoints must satisfy u < v < n");
    if (!(e.w > 0.0) || e.w > 1.0) throw std::invalid_argument("edge weight must be in (0, 1]");
  }
  build_csr(g, edges);
  return g;
}

void Graph::save(const std::string& path) const {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + path + " for writing: " + std::strerror(errno));
  std::fprintf(f, "%u %llu\n", n, static_cast<unsigned long long>(m));
  for (std::uint32_t u = 0; u < n; ++u) {
    for (std::uint64_t i = offset[u]; i < offset[u + 1]; ++i) {
      std::uint32_t v = adj[i];
      if (v <= u) continue;  // each undirected edge written once, as u < v
      std::fprintf(f, "%u %u %.17g\n", u, v, wgt[i]);
    }
  }
  if (std::fclose(f) != 0) throw std::runtime_error("write to " + path + " failed");
}

Graph Graph::load(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "r");
  if (!f) throw std::runtime_error("cannot open " + path + ": " + std::strerror(errno));
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> guard(f, std::fclose);

  unsigned long long n_in = 0, m_in = 0;
  if (std::fscanf(f, "%llu %llu", &n_in, &m_in) != 2)
    throw std::runtime_error(path + ": malformed header, expected \"n m\"");
  if (n_in == 0 || n_in > 0xffffffffull) throw std::runtime_error(path + ": node count out of range");

  std::vector<Edge> edges;
  edges.reserve(m_in);
  for (unsigned long long i = 0; i < m_in; ++i) {
    unsigned long long u = 0, v = 0;
    double w = 0.0;
    if (std::fscanf(f, "%llu %llu %lf", &u, &v, &w) != 3)
      throw std::runtime_error(path + ": truncated edge list");
    if (u >= v || v >= n_in) throw std::runtime_error(path + ": edge endpoints must satisfy u < v < n");
    if (!(w > 0.0) || w > 1.0) throw std::runtime_error(path + ": edge weight out of (0, 1]");
    edges.push_back(Edge{static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v), w});
  }
  char extra[2];
  if (std::fscanf(f, "%1s", extra) == 1)
    throw std::runtime_error(path + ": trailing data after edge list");

  Graph g;
  g.n = static_cast<std::uint32_t>(n_in);
  g.m = m_in;
  build_csr(g, edges);
  return g;
}

}  // namespace kprio
