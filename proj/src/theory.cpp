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
#include "theory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

#include "graph.hpp"
#include "phase_sim.hpp"

namespace kprio {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogTiny = -34.538776394910684;  // log(1e-15)
constexpr double kLogZeroQ = -745.0;              // exp() underflows below
constexpr double kLogHuge = 709.0;                // exp() overflows above

// log of prod_{L=1}^{n-1} (1 - r(L))^{E(L)} for one candidate pair with
// spread h, where r(L) = (p*h)^L / L! counts per-path survival and
// E(L) = (n-2)(n-3)...(n-L) counts simple i-to-j paths of length L.
// Everything stays in log space; r(L) >= 1 or an overflowing decrement
// collapses the whole product to 0 (-infinity). The per-L log-decrement is
// unimodal in L, so the loop stops once it has peaked and gone below 1e-15.
double log_pair_factor(std::uint32_t n, double p, double h,
                       std::uint32_t* max_l_used) {
  const double ph = p * h;
  if (ph <= 0.0) return 0.0;  // r(L) = 0 at every L, factor is exactly 1
  const double log_ph = std::log(ph);
  double acc = 0.0;
  double log_fact = 0.0;  // log L!
  double log_e = 0.0;     // log E(L); E(1) is the empty product 1
  double prev_logterm = -kInf;
  for (std::uint32_t l = 1; l <= n - 1; ++l) {
    log_fact += std::log(static_cast<double>(l));
    if (l >= 2) log_e += std::log(static_cast<double>(n - l));
    const double lr = static_cast<double>(l) * log_ph - log_fact;
    if (lr >= 0.0) return -kInf;  // r(L) >= 1: survival probability 0
    const double r = std::exp(lr);
    const double l1p = std::log1p(-r);
    // When r is below the subnormal range log1p(-r) rounds to -0; fall back
    // to log(-log(1 - r)) ~= log(r) = lr, exact to first order.
    const double log_neg = (l1p == 0.0) ? lr : std::log(-l1p);
    const double logterm = log_e + log_neg;  // log of the L-th decrement
    if (logterm >= kLogHuge) return -kInf;
    if (max_l_used != nullptr && l > *max_l_used) *max_l_used = l;
    acc -= std::exp(logterm);
    if (acc <= kLogZeroQ) return acc;  // q underflows to 0 regardless
    if (logterm <= prev_logterm && logterm < kLogTiny) break;
    prev_logterm = logterm;
  }
  return acc;
}

void validate_bound_input(const BoundInput& in) {
  if (in.n < 2) throw std::invalid_argument("bound: need n >= 2");
  if (!(in.p >= 0.0) || !(in.p <= 1.0))
    throw std::invalid_argument("bound: p must be in [0, 1]");
  for (std::size_t i = 0; i < in.d.size(); ++i) {
    if (!std::isfinite(in.d[i]))
      throw std::invalid_argument("bound: distances must be finite");
    if (i > 0 && in.d[i] < in.d[i - 1])
      throw std::invalid_argument("bound: distances must be ascending");
  }
  for (std::uint32_t r : in.ranks)
    if (r >= in.d.size())
      throw std::invalid_argument("bound: relaxed rank out of range");
}

double sum_unsettled(const std::vector<double>& q,
                     const std::vector<std::uint32_t>& ranks) {
  double w = 0.0;
  for (std::uint32_t r : ranks) w += 1.0 - q[r];
  return w;
}

}  // namespace

BoundOutput useless_work_bound(const BoundInput& input) {
  validate_bound_input(input);
  BoundOutput out;
  out.q.assign(input.d.size(), 1.0);
  for (std::size_t j = 1; j < input.d.size(); ++j) {
    double logq = 0.0;
    // i ascends, so the widest spreads come first and a collapsing q(j)
    // exits early
    for (std::size_t i = 0; i < j; ++i) {
      double h = input.d[j] - input.d[i];
      if (h <= 0.0) continue;  // zero spread contributes a factor of 1
      if (h > 1.0) h = 1.0;    // weights are <= 1; clamping only loosens
      logq += log_pair_factor(input.n, input.p, h, &out.max_l_used);
      if (!(logq > kLogZeroQ)) {
        logq = -kInf;
        break;
      }
    }
    out.q[j] = (logq == -kInf) ? 0.0 : std::exp(logq);
  }
  out.w_upper = sum_unsettled(out.q, input.ranks);
  return out;
}

BoundOutput simple_bound(const BoundInput& input, double h_star) {
  validate_bound_input(input);
  if (!(h_star >= 0.0) || !(h_star <= 1.0))
    throw std::invalid_argument("bound: h_star must be in [0, 1]");
  BoundOutput out;
  out.q.assign(input.d.size(), 1.0);
  if (h_star > 0.0 && input.d.size() > 1) {
    const double g =
        log_pair_factor(input.n, input.p, h_star, &out.max_l_used);
    for (std::size_t j = 1; j < input.d.size(); ++j) {
      const double logq = g * static_cast<double>(j);
      out.q[j] = (logq > kLogZeroQ) ? std::exp(logq) : 0.0;
    }
  }
  out.w_upper = sum_unsettled(out.q, input.ranks);
  return out;
}

double path_weight_density(std::uint32_t l, double h, double lambda) {
  if (l < 1) throw std::invalid_argument("density: path length must be >= 1");
  if (!(h > 0.0) || !(h <= 1.0))
    throw std::invalid_argument("density: h must be in (0, 1]");
  if (!(lambda >= 0.0))
    throw std::invalid_argument("density: lambda must be >= 0");
  if (lambda <= 0.0 || lambda > 2.0 * h) return 0.0;
  const double le = static_cast<double>(l);
  if (lambda <= h) return std::pow(lambda, le - 1.0) / std::pow(h, le);
  return 1.0 / h - std::pow(lambda - h, le - 1.0) / std::pow(h, le);
}

double path_weight_cdf(std::uint32_t l, double h, double x) {
  if (l < 1) throw std::invalid_argument("cdf: path length must be >= 1");
  if (!(h > 0.0) || !(h <= 1.0))
    throw std::invalid_argument("cdf: h must be in (0, 1]");
  if (std::isnan(x)) throw std::invalid_argument("cdf: x must not be NaN");
  if (x <= 0.0) return 0.0;
  const double le = static_cast<double>(l);
  if (x <= h) return std::pow(x / h, le) / le;
  if (x <= 2.0 * h) {
    const double y = (x - h) / h;
    return 1.0 / le + y - std::pow(y, le) / le;
  }
  return 1.0;
}

double sample_path_weight(std::uint32_t l, double h, Rng& rng) {
  if (l < 1) throw std::invalid_argument("sample: path length must be >= 1");
  if (!(h > 0.0) || !(h <= 1.0))
    throw std::invalid_argument("sample: h must be in (0, 1]");
  if (l == 1) return h * rng.unit_pos();
  // Rejection on the prefix condition: the first l-1 edges must weigh less
  // than h in total, then one unconditioned edge is appended.
  for (;;) {
    double s = 0.0;
    for (std::uint32_t i = 0; i + 1 < l; ++i) s += h * rng.unit_pos();
    if (s < h) return s + h * rng.unit_pos();
  }
}

double conditioned_min_path_prob(std::uint32_t l) {
  if (l < 1) throw std::invalid_argument("prob: path length must be >= 1");
  return 1.0 / static_cast<double>(l);
}

double mc_min_path_prob(std::uint32_t l, double h, std::uint64_t samples,
                        std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("mc: need samples >= 1");
  Rng rng(seed);
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < samples; ++i)
    if (sample_path_weight(l, h, rng) <= h) ++hits;
  return static_cast<double>(hits) / static_cast<double>(samples);
}

namespace {

// True iff some u-to-v path weighs strictly less than limit. Bounded
// shortest-path search: nothing at or beyond limit is ever expanded.
bool light_path_exists(const Graph& g, std::uint32_t u, std::uint32_t v,
                       double limit) {
  if (u == v) return limit > 0.0;
  std::vector<double> dist(g.n, kInf);
  using Entry = std::pair<double, std::uint32_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> pq;
  dist[u] = 0.0;
  pq.push({0.0, u});
  while (!pq.empty()) {
    const auto [d, x] = pq.top();
    pq.pop();
    if (d > dist[x]) continue;
    if (d >= limit) return false;  // min extraction: nothing lighter remains
    if (x == v) return true;
    for (std::uint64_t i = g.offset[x]; i < g.offset[x + 1]; ++i) {
      const std::uint32_t y = g.adj[i];
      const double nd = d + g.wgt[i];
      if (nd < dist[y] && nd < limit) {
        dist[y] = nd;
        pq.push({nd, y});
      }
    }
  }
  return false;
}

constexpr std::uint32_t kProbeBuckets = 10;
constexpr std::uint64_t kMinBucketSamples = 30;  // thinner buckets are noise

std::uint32_t bucket_of(double h) {
  auto b = static_cast<std::uint32_t>(h * kProbeBuckets);
  return b >= kProbeBuckets ? kProbeBuckets - 1 : b;
}

}  // namespace

LightPathReport light_path_probe(std::uint32_t n, double p,
                                  std::uint64_t trials, std::uint64_t seed) {
  if (n < 8 || n > 500)
    throw std::invalid_argument("probe: n must be in [8, 500]");
  if (trials == 0) throw std::invalid_argument("probe: need trials >= 1");

  std::vector<std::uint64_t> alg_cnt(kProbeBuckets, 0);
  std::vector<std::uint64_t> alg_hit(kProbeBuckets, 0);
  std::vector<std::uint64_t> rand_cnt(kProbeBuckets, 0);
  std::vector<std::uint64_t> rand_hit(kProbeBuckets, 0);

  Rng rng(seed);               // pair sampling and fresh random-side graphs
  std::uint64_t chain = seed;  // per-run seeds, distinct stream
  // Wide-ish frontier so candidate spreads populate several buckets.
  const std::uint32_t procs = std::max(2u, n / 8);
  const std::uint32_t rho = std::max(2u, n / 4);

  std::uint64_t done = 0;
  std::uint32_t stalls = 0;
  while (done < trials) {
    const std::uint64_t run_seed = splitmix64(chain);
    const Graph g = Graph::erdos_renyi(n, p, run_seed);
    const std::uint32_t source = rng.bounded(n);
    const std::uint64_t done_before = done;

    PhaseObserver observer = [&](const PhaseObservation& obs) {
      const auto& cand = *obs.candidates;
      if (cand.size() < 2) return;
      // Up to 8 ordered pairs per phase; i < j in candidate order.
      for (int t = 0; t < 8 && done < trials; ++t) {
        std::uint32_t i = rng.bounded(static_cast<std::uint32_t>(cand.size()));
        std::uint32_t j = rng.bounded(static_cast<std::uint32_t>(cand.size()));
        if (i == j) continue;
        if (i > j) std::swap(i, j);
        double h = cand[j].first - cand[i].first;
        if (!(h > 0.0)) continue;
        if (h > 1.0) h = 1.0;
        const std::uint32_t b = bucket_of(h);

        alg_cnt[b] += 1;
        if (light_path_exists(g, cand[i].second, cand[j].second, h))
          alg_hit[b] += 1;

        // Paired control: same threshold, fresh graph, uniform distinct pair.
        const Graph rg = Graph::erdos_renyi(n, p, rng.next());
        const std::uint32_t u = rng.bounded(n);
        std::uint32_t v = rng.bounded(n - 1);
        if (v >= u) ++v;
        rand_cnt[b] += 1;
        if (light_path_exists(rg, u, v, h)) rand_hit[b] += 1;

        ++done;
      }
    };
    simulate(g, source, procs, rho, run_seed, observer);

    if (done == done_before) {
      if (++stalls >= 16) break;  // degenerate setup; report what exists
    } else {
      stalls = 0;
    }
  }

  LightPathReport rep;
  rep.alg_freq.assign(kProbeBuckets, 0.0);
  rep.rand_freq.assign(kProbeBuckets, 0.0);
  rep.alg_count.assign(kProbeBuckets, 0);
  rep.rand_count.assign(kProbeBuckets, 0);
  for (std::uint32_t b = 0; b < kProbeBuckets; ++b) {
    rep.alg_count[b] = alg_cnt[b];
    rep.rand_count[b] = rand_cnt[b];
    if (alg_cnt[b] > 0)
      rep.alg_freq[b] = static_cast<double>(alg_hit[b]) /
                        static_cast<double>(alg_cnt[b]);
    if (rand_cnt[b] > 0)
      rep.rand_freq[b] = static_cast<double>(rand_hit[b]) /
                         static_cast<double>(rand_cnt[b]);
    if (alg_cnt[b] >= kMinBucketSamples && rand_cnt[b] >= kMinBucketSamples) {
      rep.buckets_total += 1;
      if (rep.alg_freq[b] <= rep.rand_freq[b]) rep.buckets_hold += 1;
    }
  }
  rep.fraction_holds =
      rep.buckets_total > 0
          ? static_cast<double>(rep.buckets_hold) / rep.buckets_total
          : 0.0;
  return rep;
}

}  // namespace kprio
