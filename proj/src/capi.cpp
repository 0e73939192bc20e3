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
#include "kprio/kprio.h"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <exception>
#include <stdexcept>
#include <string>
#include <vector>

#include "audit.hpp"
#include "dijkstra.hpp"
#include "graph.hpp"
#include "phase_sim.hpp"
#include "rng.hpp"
#include "sssp.hpp"

struct kprio_graph {
  kprio::Graph g;
};

struct kprio_sim_result {
  kprio::SimResult r;
};

namespace {

thread_local std::string t_last_error = "ok";

kprio_status fail(kprio_status s, const std::string& msg) {
  t_last_error = msg;
  return s;
}

// Translates whatever is currently in flight. File-layer problems surface
// as std::runtime_error and become IO errors; precondition violations are
// std::invalid_argument and become argument errors.
kprio_status fail_current() {
  try {
    throw;
  } catch (const std::invalid_argument& e) {
    return fail(KPRIO_ERR_ARG, e.what());
  } catch (const std::exception& e) {
    return fail(KPRIO_ERR_IO, e.what());
  } catch (...) {
    return fail(KPRIO_ERR_IO, "unknown failure");
  }
}

bool parse_backend(const char* name, kprio::BackendKind* out) {
  if (name == nullptr) return false;
  if (std::strcmp(name, "ws") == 0) {
    *out = kprio::BackendKind::ws;
  } else if (std::strcmp(name, "central") == 0) {
    *out = kprio::BackendKind::central;
  } else if (std::strcmp(name, "hybrid") == 0) {
    *out = kprio::BackendKind::hybrid;
  } else {
    return false;
  }
  return true;
}

}  // namespace

extern "C" {

const char* kprio_version(void) { return "1.0.0"; }

const char* kprio_last_error(void) { return t_last_error.c_str(); }

/* ------------------------------------------------------------------ */
/* Graphs                                                              */
/* ------------------------------------------------------------------ */

kprio_status kprio_graph_random(uint32_t n, double p, uint64_t seed,
                                kprio_graph** out) {
  if (out == nullptr) return fail(KPRIO_ERR_ARG, "null output handle");
  try {
    auto* h = new kprio_graph{kprio::Graph::erdos_renyi(n, p, seed)};
    *out = h;
    return KPRIO_OK;
  } catch (...) {
    return fail_current();
  }
}

kprio_status kprio_graph_load(const char* path, kprio_graph** out) {
  if (out == nullptr) return fail(KPRIO_ERR_ARG, "null output handle");
  if (path == nullptr) return fail(KPRIO_ERR_ARG, "null path");
  try {
    auto* h = new kprio_graph{kprio::Graph::load(path)};
    *out = h;
    return KPRIO_OK;
  } catch (...) {
    return fail_current();
  }
}

kprio_status kprio_graph_save(const kprio_graph* g, const char* path) {
  if (g == nullptr) return fail(KPRIO_ERR_ARG, "null graph");
  if (path == nullptr) return fail(KPRIO_ERR_ARG, "null path");
  try {
    g->g.save(path);
    return KPRIO_OK;
  } catch (...) {
    return fail_current();
  }
}

void kprio_graph_free(kprio_graph* g) { delete g; }

uint32_t kprio_graph_nodes(const kprio_graph* g) {
  return g == nullptr ? 0 : g->g.n;
}

uint64_t kprio_graph_edges(const kprio_graph* g) {
  return g == nullptr ? 0 : g->g.m;
}

double kprio_graph_density(const kprio_graph* g) {
  return g == nullptr ? 0.0 : g->g.density();
}

/* ------------------------------------------------------------------ */
/* Shortest paths                                                      */
/* ------------------------------------------------------------------ */

kprio_status kprio_sssp_run(const kprio_graph* g, const char* backend_name,
                            uint32_t threads, uint32_t k, uint64_t seed,
                            uint32_t source, uint64_t budget_ms, int verify,
                            kprio_sssp_stats* stats, double* dist_out) {
  if (g == nullptr) return fail(KPRIO_ERR_ARG, "null graph");
  kprio::BackendKind kind;
  if (!parse_backend(backend_name, &kind))
    return fail(KPRIO_ERR_ARG, "backend must be ws, central or hybrid");
  if (threads < 1) return fail(KPRIO_ERR_ARG, "need at least one thread");
  if (k < 1) return fail(KPRIO_ERR_ARG, "relaxation window must be at least 1");
  try {
    kprio::SsspOptions opts;
    opts.backend = kind;
    opts.places = threads;
    opts.k = k;
    opts.seed = seed;
    opts.source = source;  // kRandomSource shares the header sentinel value
    opts.budget_ms = budget_ms;
    kprio::SsspResult res = kprio::run_sssp(g->g, opts);
    if (res.timed_out)
      return fail(KPRIO_ERR_TIMEOUT, "shortest-path run exceeded its budget");
    if (verify != 0) {
      const std::vector<double> want = kprio::dijkstra(g->g, res.source);
      for (std::uint32_t v = 0; v < g->g.n; ++v) {
        if (res.dist[v] != want[v]) {
          char buf[128];
          std::snprintf(buf, sizeof buf,
                        "distance mismatch at node %u: got %.17g want %.17g",
                        v, res.dist[v], want[v]);
          return fail(KPRIO_ERR_VERIFY, buf);
        }
      }
    }
    if (stats != nullptr) {
      stats->relaxations = res.relaxations;
      stats->dead_tasks = res.dead_tasks;
      stats->pushes = res.pushes;
      stats->pops = res.pops;
      stats->steals_or_spies = res.steals_or_spies;
      stats->source = res.source;
      stats->wall_ms = res.wall_ms;
    }
    if (dist_out != nullptr)
      std::copy(res.dist.begin(), res.dist.end(), dist_out);
    return KPRIO_OK;
  } catch (...) {
    return fail_current();
  }
}

kprio_status kprio_oracle_distances(const kprio_graph* g, uint32_t source,
                                    double* dist_out) {
  if (g == nullptr) return fail(KPRIO_ERR_ARG, "null graph");
  if (dist_out == nullptr) return fail(KPRIO_ERR_ARG, "null output buffer");
  if (source >= g->g.n) return fail(KPRIO_ERR_ARG, "source node out of range");
  try {
    const std::vector<double> d = kprio::dijkstra(g->g, source);
    std::copy(d.begin(), d.end(), dist_out);
    return KPRIO_OK;
  } catch (...) {
    return fail_current();
  }
}

/* ------------------------------------------------------------------ */
/* Phase model                                                         */
/* ------------------------------------------------------------------ */

kprio_status kprio_simulate(const kprio_graph* g, uint32_t source,
                            uint32_t procs, uint32_t rho, uint64_t seed,
                            kprio_sim_result** out) {
  if (out == nullptr) return fail(KPRIO_ERR_ARG, "null output handle");
  if (g == nullptr) return fail(KPRIO_ERR_ARG, "null graph");
  try {
    std::uint32_t src = source;
    if (src == KPRIO_SOURCE_FROM_SEED) {
      kprio::Rng r(seed);  // same derivation the solver uses
      src = static_cast<std::uint32_t>(r.bounded(g->g.n));
    }
    auto* h = new kprio_sim_result{kprio::simulate(g->g, src, procs, rho, seed)};
    *out = h;
    return KPRIO_OK;
  } catch (...) {
    return fail_current();
  }
}

void kprio_sim_result_free(kprio_sim_result* r) { delete r; }

uint64_t kprio_sim_phase_count(const kprio_sim_result* r) {
  return r == nullptr ? 0 : r->r.phases.size();
}

kprio_status kprio_sim_phase(const kprio_sim_result* r, uint64_t index,
                             kprio_phase_row* out) {
  if (r == nullptr) return fail(KPRIO_ERR_ARG, "null result");
  if (out == nullptr) return fail(KPRIO_ERR_ARG, "null output row");
  if (index >= r->r.phases.size())
    return fail(KPRIO_ERR_ARG, "phase index out of range");
  const kprio::PhaseMetrics& m = r->r.phases[index];
  out->phase = index;
  out->relaxed = m.relaxed;
  out->settled = m.settled;
  out->useless = m.useless;
  out->h_star = m.h_star;
  out->active_size = m.active_size;
  out->bound_useless = m.bound_useless;
  return KPRIO_OK;
}

uint32_t kprio_sim_source(const kprio_sim_result* r) {
  return r == nullptr ? 0 : r->r.source;
}

uint64_t kprio_sim_total_relaxed(const kprio_sim_result* r) {
  return r == nullptr ? 0 : r->r.total_relaxed;
}

uint64_t kprio_sim_total_useless(const kprio_sim_result* r) {
  return r == nullptr ? 0 : r->r.total_useless;
}

kprio_status kprio_sim_distances(const kprio_sim_result* r, double* dist_out,
                                 uint32_t len) {
  if (r == nullptr) return fail(KPRIO_ERR_ARG, "null result");
  if (dist_out == nullptr) return fail(KPRIO_ERR_ARG, "null output buffer");
  if (len != r->r.dist.size())
    return fail(KPRIO_ERR_ARG, "buffer length must equal the node count");
  std::copy(r->r.dist.begin(), r->r.dist.end(), dist_out);
  return KPRIO_OK;
}

/* ------------------------------------------------------------------ */
/* Audits                                                              */
/* ------------------------------------------------------------------ */

kprio_status kprio_audit_sequential(const char* backend_name, uint32_t places,
                                    uint64_t ops, uint32_t k, uint64_t seed,
                                    uint32_t mutate_bias,
                                    const char* counterexample_path,
                                    uint64_t* pops_out) {
  kprio::BackendKind kind;
  if (!parse_backend(backend_name, &kind))
    return fail(KPRIO_ERR_ARG, "backend must be ws, central or hybrid");
  kprio::Discipline disc;
  if (kind == kprio::BackendKind::central) {
    disc = kprio::Discipline::central_k;
  } else if (kind == kprio::BackendKind::hybrid) {
    disc = kprio::Discipline::hybrid_per_place_k;
  } else {
    return fail(KPRIO_ERR_ARG,
                "the ws backend has no relaxation window to audit");
  }
  try {
    kprio::AuditTuning tuning;
    if (k > 0) {
      tuning.k_mix = {k};
    } else if (disc == kprio::Discipline::central_k) {
      tuning.k_mix = {1, 4, 16};  // k is clamped to >= 1 centrally
    } else {
      tuning.k_mix = {0, 1, 4, 16};
    }
    tuning.backend_k_bias = mutate_bias;
    std::uint32_t k_max = 1;
    for (std::uint32_t kk : tuning.k_mix) k_max = std::max(k_max, kk);
    k_max += mutate_bias;
    std::unique_ptr<kprio::Backend> backend =
        kprio::make_backend(kind, places, k_max, seed);
    kprio::AuditResult res =
        kprio::sequential_audit(*backend, disc, ops, seed, tuning);
    if (pops_out != nullptr) *pops_out = res.pops_succeeded;
    if (!res.pass) {
      if (counterexample_path != nullptr) {
        const std::string csv = kprio::trace_to_csv(res.counterexample);
        std::FILE* f = std::fopen(counterexample_path, "w");
        if (f == nullptr)
          return fail(KPRIO_ERR_IO, std::string("cannot write ") +
                                        counterexample_path);
        std::fwrite(csv.data(), 1, csv.size(), f);
        if (std::fclose(f) != 0)
          return fail(KPRIO_ERR_IO, std::string("write to ") +
                                        counterexample_path + " failed");
      }
      return fail(KPRIO_ERR_VERIFY, res.failure);
    }
    return KPRIO_OK;
  } catch (...) {
    return fail_current();
  }
}

kprio_status kprio_audit_stress(const char* backend_name, uint32_t places,
                                uint64_t tasks, uint64_t seed, int freeze_one,
                                uint64_t budget_ms, double* elapsed_ms_out) {
  kprio::BackendKind kind;
  if (!parse_backend(backend_name, &kind))
    return fail(KPRIO_ERR_ARG, "backend must be ws, central or hybrid");
  try {
    kprio::StressOptions opts;
    opts.kind = kind;
    opts.places = places;
    opts.tasks = tasks;
    opts.seed = seed;
    opts.freeze_one = freeze_one != 0;
    opts.budget_ms = budget_ms;
    kprio::StressResult res = kprio::concurrent_stress(opts);
    if (elapsed_ms_out != nullptr) *elapsed_ms_out = res.elapsed_ms;
    if (res.timed_out)
      return fail(KPRIO_ERR_TIMEOUT, res.detail.empty()
                                         ? "stress run exceeded its budget"
                                         : res.detail);
    if (!res.pass) return fail(KPRIO_ERR_VERIFY, res.detail);
    return KPRIO_OK;
  } catch (...) {
    return fail_current();
  }
}

}  // extern "C"
