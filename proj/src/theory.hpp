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
#ifndef KPRIO_THEORY_HPP
#define KPRIO_THEORY_HPP

#include <cstdint>
#include <vector>

#include "rng.hpp"

namespace kprio {

// One execution step of priority-relaxed shortest paths: the best active
// nodes (the candidates) and which of them actually got relaxed. Everything
// downstream is a pure function of these numbers.
struct BoundInput {
  std::uint32_t n = 0;               // graph node count
  double p = 0.0;                    // edge probability
  std::vector<double> d;             // candidate distances, ascending
  std::vector<std::uint32_t> ranks;  // 0-based indices into d of relaxed nodes
};

struct BoundOutput {
  double w_upper = 0.0;        // upper bound on expected useless relaxations
  std::vector<double> q;       // per-candidate settled-probability lower
                               // bounds, each in [0, 1]
  std::uint32_t max_l_used = 0;  // deepest path length the series needed
};

// Bounds the expected number of useless relaxations in the step. q(j) lower
// bounds the probability that candidate j is already settled: the product
// over better candidates i of the probability that no i-to-j path weighs
// less than d(j) - d(i). w_upper sums 1 - q over the relaxed ranks, so it
// never exceeds the relaxed count. Spreads above 1 are clamped to 1 (edge
// weights are at most 1, so clamping only loosens the bound). Throws
// std::invalid_argument on malformed input.
BoundOutput useless_work_bound(const BoundInput& input);

// Weaker form: every pairwise spread is replaced by the single value h_star,
// making log q(j) linear in rank. Dominates the full bound whenever h_star
// is at least the largest spread. h_star must lie in [0, 1].
BoundOutput simple_bound(const BoundInput& input, double h_star);

// Density at lambda of the weight of an L-edge path whose every proper
// prefix weighs less than h. Support (0, 2h]. Throws on l < 1, h outside
// (0, 1], or lambda < 0.
double path_weight_density(std::uint32_t l, double h, double lambda);

// CDF matching path_weight_density.
double path_weight_cdf(std::uint32_t l, double h, double x);

// One sample from the conditioned path-weight distribution: rejection on the
// prefix condition, then one more uniform edge.
double sample_path_weight(std::uint32_t l, double h, Rng& rng);

// P[conditioned L-edge path weight <= h]. Closed form: exactly 1/L.
double conditioned_min_path_prob(std::uint32_t l);

// Monte-Carlo companion for conditioned_min_path_prob.
double mc_min_path_prob(std::uint32_t l, double h, std::uint64_t samples,
                        std::uint64_t seed);

// Empirical check of the light-path comparison behind the bound: candidate
// pairs drawn from live simulator phases versus uniformly random node pairs
// in fresh random graphs, both tested for a path of weight under the pair's
// own spread h, bucketed by h over (0, 1].
struct LightPathReport {
  std::uint32_t buckets_total = 0;  // buckets sampled on both sides
  std::uint32_t buckets_hold = 0;   // buckets with alg freq <= random freq
  double fraction_holds = 0.0;
  std::vector<double> alg_freq;          // per-bucket frequencies
  std::vector<double> rand_freq;
  std::vector<std::uint64_t> alg_count;  // per-bucket sample counts
  std::vector<std::uint64_t> rand_count;
};

// Runs simulator phases on graphs G(n, p) until `trials` candidate pairs
// have been tested. Requires n <= 500 and p admissible for the generator.
LightPathReport light_path_probe(std::uint32_t n, double p,
                                  std::uint64_t trials, std::uint64_t seed);

}  // namespace kprio

#endif
