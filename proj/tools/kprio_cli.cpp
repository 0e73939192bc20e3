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

// kprio command-line driver: graph generation, shortest-path benchmarks,
// the phase model with its useless-work bound, and queue audits. Output is
// CSV for external plotting; nothing is rendered here.
//
// Exit codes: 0 success, 1 validation/oracle/IO failure, 2 bad arguments,
// 3 liveness timeout. Given the same seeds every command reproduces the
// same output except for wall-clock columns.

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kprio/kprio.h"

namespace {

int exit_code(kprio_status s) {
  switch (s) {
    case KPRIO_OK:
      return 0;
    case KPRIO_ERR_ARG:
      return 2;
    case KPRIO_ERR_TIMEOUT:
      return 3;
    default:
      return 1;  // verification and file failures
  }
}

int fail_with(kprio_status s) {
  std::fprintf(stderr, "kprio: %s\n", kprio_last_error());
  return exit_code(s);
}

// CSV sink: a path, or "-" for stdout. Write failures surface at finish().
class Sink {
 public:
  ~Sink() {
    if (owned_ && f_ != nullptr) std::fclose(f_);
  }
  bool open(const std::string& path) {
    if (path.empty() || path == "-") {
      f_ = stdout;
      return true;
    }
    f_ = std::fopen(path.c_str(), "w");
    owned_ = f_ != nullptr;
    return owned_;
  }
  std::FILE* get() { return f_; }
  bool finish() {
    if (f_ == nullptr) return false;
    const bool ok = std::fflush(f_) == 0 && std::ferror(f_) == 0;
    if (owned_) {
      const bool closed = std::fclose(f_) == 0;
      f_ = nullptr;
      owned_ = false;
      return ok && closed;
    }
    return ok;
  }

 private:
  std::FILE* f_ = nullptr;
  bool owned_ = false;
};

struct GraphGuard {
  kprio_graph* g = nullptr;
  ~GraphGuard() { kprio_graph_free(g); }
};

struct SimGuard {
  kprio_sim_result* r = nullptr;
  ~SimGuard() { kprio_sim_result_free(r); }
};

int run_gen_graph(std::uint32_t n, double p, std::uint64_t seed,
                  const std::string& out) {
  GraphGuard g;
  kprio_status s = kprio_graph_random(n, p, seed, &g.g);
  if (s != KPRIO_OK) return fail_with(s);
  s = kprio_graph_save(g.g, out.c_str());
  if (s != KPRIO_OK) return fail_with(s);
  std::fprintf(stderr, "kprio: wrote %s (n=%u, m=%" PRIu64 ")\n", out.c_str(),
               kprio_graph_nodes(g.g), kprio_graph_edges(g.g));
  return 0;
}

int run_sssp(const std::string& graph_path, const std::string& backend,
             std::uint32_t threads, const std::vector<std::uint32_t>& ks,
             std::uint64_t seed, std::uint32_t reps, std::uint64_t budget_ms,
             const std::string& out) {
  GraphGuard g;
  kprio_status s = kprio_graph_load(graph_path.c_str(), &g.g);
  if (s != KPRIO_OK) return fail_with(s);

  Sink sink;
  if (!sink.open(out)) {
    std::fprintf(stderr, "kprio: cannot open %s for writing\n", out.c_str());
    return 1;
  }
  std::fprintf(sink.get(), "# kprio-csv v1\n");
  std::fprintf(sink.get(),
               "backend,n,p,threads,k,seed,rep,time_ms,relaxations,"
               "dead_tasks,pushes\n");

  const std::uint32_t n = kprio_graph_nodes(g.g);
  const double density = kprio_graph_density(g.g);
  for (std::uint32_t k : ks) {
    for (std::uint32_t rep = 0; rep < reps; ++rep) {
      // Every repetition is solved under a fresh seed and each result is
      // checked against the sequential reference before a row is emitted.
      kprio_sssp_stats st;
      s = kprio_sssp_run(g.g, backend.c_str(), threads, k, seed + rep,
                         KPRIO_SOURCE_FROM_SEED, budget_ms, 1, &st, nullptr);
      if (s != KPRIO_OK) return fail_with(s);
      std::fprintf(sink.get(),
                   "%s,%u,%.17g,%u,%u,%" PRIu64 ",%u,%.3f,%" PRIu64
                   ",%" PRIu64 ",%" PRIu64 "\n",
                   backend.c_str(), n, density, threads, k, seed, rep,
                   st.wall_ms, st.relaxations, st.dead_tasks, st.pushes);
    }
  }
  if (!sink.finish()) {
    std::fprintf(stderr, "kprio: write to %s failed\n", out.c_str());
    return 1;
  }
  return 0;
}

int run_simulate(std::uint32_t n, double p, std::uint64_t seed,
                 std::uint32_t procs, std::uint32_t rho,
                 const std::string& out) {
  GraphGuard g;
  kprio_status s = kprio_graph_random(n, p, seed, &g.g);
  if (s != KPRIO_OK) return fail_with(s);
  SimGuard sim;
  s = kprio_simulate(g.g, KPRIO_SOURCE_FROM_SEED, procs, rho, seed, &sim.r);
  if (s != KPRIO_OK) return fail_with(s);

  Sink sink;
  if (!sink.open(out)) {
    std::fprintf(stderr, "kprio: cannot open %s for writing\n", out.c_str());
    return 1;
  }
  std::fprintf(sink.get(), "# kprio-csv v1\n");
  std::fprintf(sink.get(),
               "phase,relaxed,settled,useless,h_star,active_size,"
               "bound_useless\n");
  const std::uint64_t phases = kprio_sim_phase_count(sim.r);
  for (std::uint64_t i = 0; i < phases; ++i) {
    kprio_phase_row row;
    s = kprio_sim_phase(sim.r, i, &row);
    if (s != KPRIO_OK) return fail_with(s);
    std::fprintf(sink.get(),
                 "%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64
                 ",%.17g,%" PRIu64 ",%.17g\n",
                 row.phase, row.relaxed, row.settled, row.useless, row.h_star,
                 row.active_size, row.bound_useless);
  }
  if (!sink.finish()) {
    std::fprintf(stderr, "kprio: write to %s failed\n", out.c_str());
    return 1;
  }
  return 0;
}

int run_audit(const std::string& backend, std::uint64_t ops,
              std::uint32_t threads, std::uint32_t k, std::uint64_t seed,
              bool stress, bool freeze, std::uint32_t mutate_bias,
              std::uint64_t budget_ms, const std::string& cex_out) {
  if (stress) {
    double elapsed = 0.0;
    const kprio_status s =
        kprio_audit_stress(backend.c_str(), threads, ops, seed,
                           freeze ? 1 : 0, budget_ms, &elapsed);
    if (s != KPRIO_OK) return fail_with(s);
    std::fprintf(stderr,
                 "kprio: stress pass (%s, %u workers, %" PRIu64
                 " tasks, %.1f ms)\n",
                 backend.c_str(), threads, ops, elapsed);
    return 0;
  }
  std::uint64_t pops = 0;
  const kprio_status s = kprio_audit_sequential(
      backend.c_str(), threads, ops, k, seed, mutate_bias,
      cex_out.empty() ? nullptr : cex_out.c_str(), &pops);
  if (s != KPRIO_OK) {
    if (s == KPRIO_ERR_VERIFY && !cex_out.empty())
      std::fprintf(stderr, "kprio: counterexample trace written to %s\n",
                   cex_out.c_str());
    return fail_with(s);
  }
  std::fprintf(stderr,
               "kprio: audit pass (%s, %" PRIu64 " ops, %" PRIu64
               " pops checked)\n",
               backend.c_str(), ops, pops);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kprio: concurrent relaxed-priority scheduling toolkit"};
  app.require_subcommand(1);
  int rc = 0;

  // gen-graph
  std::uint32_t gg_n = 0;
  double gg_p = 0.0;
  std::uint64_t gg_seed = 1;
  std::string gg_out = "graph.txt";
  CLI::App* gen = app.add_subcommand(
      "gen-graph", "Generate a random weighted graph file");
  gen->add_option("--n", gg_n, "Number of nodes")->required();
  gen->add_option("--p", gg_p, "Edge probability in (0, 1]")->required();
  gen->add_option("--seed", gg_seed, "Generator seed")->capture_default_str();
  gen->add_option("--out", gg_out, "Output path")->capture_default_str();
  gen->callback([&] { rc = run_gen_graph(gg_n, gg_p, gg_seed, gg_out); });

  // sssp
  std::string ss_graph, ss_backend, ss_out = "-";
  std::uint32_t ss_threads = 1, ss_k = 64, ss_reps = 1;
  std::uint64_t ss_seed = 1, ss_budget = 120000;
  bool ss_sweep = false;
  CLI::App* sssp = app.add_subcommand(
      "sssp", "Benchmark parallel shortest paths against the oracle");
  sssp->add_option("--graph", ss_graph, "Graph file to load")->required();
  sssp->add_option("--backend", ss_backend, "ws, central or hybrid")
      ->required()
      ->check(CLI::IsMember({"ws", "central", "hybrid"}));
  sssp->add_option("--threads", ss_threads, "Worker thread count")->capture_default_str()
      ->envname("KPRIO_THREADS");
  sssp->add_option("--k", ss_k, "Relaxation window")->capture_default_str();
  sssp->add_flag("--k-sweep", ss_sweep,
                 "Sweep k over {1,8,32,128,512,2048}, ignoring --k");
  sssp->add_option("--seed", ss_seed, "Base seed; repetition r runs seed+r")->capture_default_str();
  sssp->add_option("--reps", ss_reps, "Repetitions per k")->capture_default_str();
  sssp->add_option("--budget-ms", ss_budget,
                   "Per-run liveness budget, 0 to disable")->capture_default_str();
  sssp->add_option("--out", ss_out, "CSV path, - for stdout")->capture_default_str();
  sssp->callback([&] {
    const std::vector<std::uint32_t> ks =
        ss_sweep ? std::vector<std::uint32_t>{1, 8, 32, 128, 512, 2048}
                 : std::vector<std::uint32_t>{ss_k};
    rc = run_sssp(ss_graph, ss_backend, ss_threads, ks, ss_seed, ss_reps,
                  ss_budget, ss_out);
  });

  // simulate
  std::uint32_t si_n = 0, si_procs = 1, si_rho = 0;
  double si_p = 0.0;
  std::uint64_t si_seed = 1;
  std::string si_out = "-";
  CLI::App* sim = app.add_subcommand(
      "simulate", "Run the deterministic phase model with the useless-work "
                  "bound per phase");
  sim->add_option("--n", si_n, "Number of nodes")->required();
  sim->add_option("--p", si_p, "Edge probability in (0, 1]")->required();
  sim->add_option("--seed", si_seed, "Seed for graph, source and tie-breaks")->capture_default_str();
  sim->add_option("--procs", si_procs, "Model processors per phase")->capture_default_str();
  sim->add_option("--rho", si_rho, "Newest actives held out each phase")->capture_default_str();
  sim->add_option("--out", si_out, "CSV path, - for stdout")->capture_default_str();
  sim->callback(
      [&] { rc = run_simulate(si_n, si_p, si_seed, si_procs, si_rho, si_out); });

  // audit
  std::string au_backend, au_out;
  std::uint64_t au_ops = 100000, au_seed = 1, au_budget = 240000;
  std::uint32_t au_threads = 2, au_k = 0, au_mutate = 0;
  bool au_stress = false, au_freeze = false;
  CLI::App* audit = app.add_subcommand(
      "audit", "Check a backend against its relaxation discipline");
  audit->add_option("--backend", au_backend, "central or hybrid; ws allowed "
                                             "with --stress")
      ->required()
      ->check(CLI::IsMember({"ws", "central", "hybrid"}));
  audit->add_option("--ops", au_ops,
                    "Operations to replay (tasks with --stress)")->capture_default_str();
  audit->add_option("--threads", au_threads,
                    "Places (workers with --stress)")->capture_default_str()
      ->envname("KPRIO_THREADS");
  audit->add_option("--k", au_k, "Window width per push, 0 for a mixed load")->capture_default_str();
  audit->add_option("--seed", au_seed, "Replay seed")->capture_default_str();
  audit->add_flag("--stress", au_stress,
                  "Multi-threaded exactly-once stress instead of the "
                  "sequential oracle replay");
  audit->add_flag("--freeze", au_freeze,
                  "Park one worker partway through the stress run");
  audit->add_option("--mutate", au_mutate,
                    "Widen the backend's window by this much so the audit "
                    "must fail; proves violations are caught")->capture_default_str();
  audit->add_option("--budget-ms", au_budget, "Stress liveness budget")->capture_default_str();
  audit->add_option("--out", au_out, "Counterexample CSV path on failure");
  audit->callback([&] {
    rc = run_audit(au_backend, au_ops, au_threads, au_k, au_seed, au_stress,
                   au_freeze, au_mutate, au_budget, au_out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad arguments, or help/version
  }
  return rc;
}
