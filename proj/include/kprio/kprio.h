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
#ifndef KPRIO_KPRIO_H
#define KPRIO_KPRIO_H

/* C interface to the kprio scheduling library.
 *
 * Every function returns a kprio_status; out-parameters are written only on
 * KPRIO_OK unless stated otherwise. On any failure kprio_last_error() holds
 * a human-readable message for the calling thread. Handles are opaque and
 * must be released with their matching _free function. All entry points are
 * safe to call from multiple threads as long as no handle is used
 * concurrently.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(KPRIO_BUILD_SHARED)
#define KPRIO_API __attribute__((visibility("default")))
#else
#define KPRIO_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kprio_status {
  KPRIO_OK = 0,
  KPRIO_ERR_VERIFY = 1,  /* result failed validation against the oracle */
  KPRIO_ERR_ARG = 2,     /* invalid argument or malformed name */
  KPRIO_ERR_TIMEOUT = 3, /* liveness budget exhausted */
  KPRIO_ERR_IO = 4       /* file could not be read, written or parsed */
} kprio_status;

/* Library version as "major.minor.patch". */
KPRIO_API const char* kprio_version(void);

/* Message describing the last failure on this thread. Never NULL; the
 * buffer stays valid until the next kprio call on the same thread. */
KPRIO_API const char* kprio_last_error(void);

/* ------------------------------------------------------------------ */
/* Graphs                                                              */
/* ------------------------------------------------------------------ */

typedef struct kprio_graph kprio_graph;

/* Random undirected graph on n nodes where each pair is joined with
 * probability p and weights are uniform in (0, 1]. Requires n >= 2 and p
 * large enough that the result is connected with high probability. */
KPRIO_API kprio_status kprio_graph_random(uint32_t n, double p, uint64_t seed,
                                          kprio_graph** out);

/* Text format round-trip: "n m" header, then one "u v w" line per edge
 * with u < v and full-precision weights. */
KPRIO_API kprio_status kprio_graph_load(const char* path, kprio_graph** out);
KPRIO_API kprio_status kprio_graph_save(const kprio_graph* g,
                                        const char* path);

KPRIO_API void kprio_graph_free(kprio_graph* g);

KPRIO_API uint32_t kprio_graph_nodes(const kprio_graph* g);
KPRIO_API uint64_t kprio_graph_edges(const kprio_graph* g);
/* Fraction of node pairs joined by an edge: 2m / (n (n - 1)). */
KPRIO_API double kprio_graph_density(const kprio_graph* g);

/* ------------------------------------------------------------------ */
/* Shortest paths                                                      */
/* ------------------------------------------------------------------ */

/* Pass as `source` to have one chosen uniformly from the seed. */
#define KPRIO_SOURCE_FROM_SEED 0xffffffffu

typedef struct kprio_sssp_stats {
  uint64_t relaxations;      /* tasks executed */
  uint64_t dead_tasks;       /* tasks dropped as stale before running */
  uint64_t pushes;
  uint64_t pops;
  uint64_t steals_or_spies;  /* cross-place acquisitions */
  uint32_t source;           /* source actually used */
  double wall_ms;            /* wall clock around the solve, load excluded */
} kprio_sssp_stats;

/* Parallel single-source shortest paths over `backend_name`, one of "ws",
 * "central" or "hybrid", with `threads` workers and relaxation window k.
 * When `verify` is nonzero the distances are checked bit for bit against a
 * sequential reference and a mismatch returns KPRIO_ERR_VERIFY. `stats` may
 * be NULL; `dist_out`, when non-NULL, must hold kprio_graph_nodes(g)
 * doubles and receives the distances (+inf marks unreachable nodes). A run
 * that exceeds `budget_ms` (0 disables the watchdog) returns
 * KPRIO_ERR_TIMEOUT. */
KPRIO_API kprio_status kprio_sssp_run(const kprio_graph* g,
                                      const char* backend_name,
                                      uint32_t threads, uint32_t k,
                                      uint64_t seed, uint32_t source,
                                      uint64_t budget_ms, int verify,
                                      kprio_sssp_stats* stats,
                                      double* dist_out);

/* Sequential reference distances. `dist_out` must hold n doubles. */
KPRIO_API kprio_status kprio_oracle_distances(const kprio_graph* g,
                                              uint32_t source,
                                              double* dist_out);

/* ------------------------------------------------------------------ */
/* Phase model                                                         */
/* ------------------------------------------------------------------ */

typedef struct kprio_sim_result kprio_sim_result;

typedef struct kprio_phase_row {
  uint64_t phase;        /* zero-based phase index */
  uint64_t relaxed;      /* nodes relaxed this phase */
  uint64_t settled;      /* relaxed already at their final distance */
  uint64_t useless;      /* relaxed - settled */
  double h_star;         /* distance spread of the relaxed nodes */
  uint64_t active_size;  /* actives at phase start */
  double bound_useless;  /* expected-useless upper bound for the phase */
} kprio_phase_row;

/* Deterministic phase model of priority-relaxed shortest paths: each phase
 * relaxes up to `procs` of the best active nodes while the `rho` newest
 * sit out, and applies all updates synchronously. Identical arguments give
 * identical results. `source` may be KPRIO_SOURCE_FROM_SEED. */
KPRIO_API kprio_status kprio_simulate(const kprio_graph* g, uint32_t source,
                                      uint32_t procs, uint32_t rho,
                                      uint64_t seed, kprio_sim_result** out);

KPRIO_API void kprio_sim_result_free(kprio_sim_result* r);

KPRIO_API uint64_t kprio_sim_phase_count(const kprio_sim_result* r);
KPRIO_API kprio_status kprio_sim_phase(const kprio_sim_result* r,
                                       uint64_t index, kprio_phase_row* out);
KPRIO_API uint32_t kprio_sim_source(const kprio_sim_result* r);
KPRIO_API uint64_t kprio_sim_total_relaxed(const kprio_sim_result* r);
KPRIO_API uint64_t kprio_sim_total_useless(const kprio_sim_result* r);
/* Final tentative distances; `dist_out` must hold `len` doubles and `len`
 * must equal the node count of the simulated graph. */
KPRIO_API kprio_status kprio_sim_distances(const kprio_sim_result* r,
                                           double* dist_out, uint32_t len);

/* ------------------------------------------------------------------ */
/* Audits                                                              */
/* ------------------------------------------------------------------ */

/* Replays `ops` random push/pop operations against a fresh backend and
 * checks every successful pop against an incremental legality oracle for
 * the backend's relaxation discipline ("central": pop may ignore the k
 * newest live items globally; "hybrid": the k newest per place). k = 0
 * audits a mixed workload over several window widths; k > 0 pins every
 * push to that width. `mutate_bias` widens the window the backend is
 * handed by that much while the oracle still checks the declared width, so
 * any nonzero bias must make the audit fail; it exists to prove the audit
 * can catch a misbehaving backend. On violation returns KPRIO_ERR_VERIFY
 * and, when `counterexample_path` is non-NULL, writes the trace prefix
 * ending at the illegal pop there as CSV. `pops_out` (optional) receives
 * the number of successful pops replayed. */
KPRIO_API kprio_status kprio_audit_sequential(const char* backend_name,
                                              uint32_t places, uint64_t ops,
                                              uint32_t k, uint64_t seed,
                                              uint32_t mutate_bias,
                                              const char* counterexample_path,
                                              uint64_t* pops_out);

/* Multi-threaded exactly-once check: `places` workers consume tasks and
 * spawn children until `tasks` ids have been produced, then the consumed
 * multiset is compared against the produced set. Any duplicate or lost
 * task returns KPRIO_ERR_VERIFY. When `freeze_one` is nonzero one worker
 * stops cooperating partway through and the rest must still drain
 * (backends "central" and "hybrid" guarantee this; "ws" does not). Returns
 * KPRIO_ERR_TIMEOUT when `budget_ms` is exceeded. `elapsed_ms_out`
 * (optional) receives the wall-clock duration. */
KPRIO_API kprio_status kprio_audit_stress(const char* backend_name,
                                          uint32_t places, uint64_t tasks,
                                          uint64_t seed, int freeze_one,
                                          uint64_t budget_ms,
                                          double* elapsed_ms_out);

#ifdef __cplusplus
}
#endif

#endif
