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
#include "audit.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <thread>

#include "central_backend.hpp"
#include "hybrid_backend.hpp"
#include "rng.hpp"
#include "ws_backend.hpp"

namespace kprio {

// ---------------------------------------------------------------------------
// Fenwick tree over push sequence numbers, 1 while the item is live.
// Sequences are appended densely, so growth is always a one-slot append.

void RelaxationOracle::Fenwick::add(std::size_t idx, std::int32_t delta) {
  if (idx == tree.size()) {
    const std::size_t i = idx + 1;  // 1-based
    const std::size_t low = i & (~i + 1);
    const std::int64_t below = prefix(idx) - prefix(idx + 1 - low);
    tree.push_back(static_cast<std::int32_t>(below + delta));
    total += delta;
    return;
  }
  if (idx > tree.size()) throw std::logic_error("fenwick: sparse append");
  total += delta;
  for (std::size_t i = idx + 1; i <= tree.size(); i += i & (~i + 1))
    tree[i - 1] += delta;
}

std::int64_t RelaxationOracle::Fenwick::prefix(std::size_t count) const {
  std::int64_t s = 0;
  for (std::size_t i = count; i > 0; i -= i & (~i + 1)) s += tree[i - 1];
  return s;
}

// ---------------------------------------------------------------------------
// RelaxationOracle

RelaxationOracle::RelaxationOracle(Discipline d) : disc_(d) {
  if (d == Discipline::central_k) scopes_.resize(1);
}

void RelaxationOracle::on_push(PlaceId place, std::uint64_t id, double key,
                               std::uint32_t k) {
  if (items_.count(id))
    throw std::invalid_argument("oracle: duplicate push id");
  const std::size_t scope = disc_ == Discipline::central_k ? 0 : place;
  if (scope >= scopes_.size()) scopes_.resize(scope + 1);
  ItemInfo info;
  info.key = key;
  info.k = k;
  info.place = place;
  info.seq = scopes_[scope].tree.size();
  info.is_live = true;
  scopes_[scope].add(info.seq, +1);
  by_key_.emplace(key, id);
  items_.emplace(id, info);
}

void RelaxationOracle::on_pop(std::uint64_t id) {
  auto it = items_.find(id);
  if (it == items_.end() || !it->second.is_live)
    throw std::invalid_argument("oracle: pop of non-live id");
  ItemInfo& info = it->second;
  info.is_live = false;
  const std::size_t scope = disc_ == Discipline::central_k ? 0 : info.place;
  scopes_[scope].add(info.seq, -1);
  by_key_.erase({info.key, id});
}

bool RelaxationOracle::live(std::uint64_t id) const {
  auto it = items_.find(id);
  return it != items_.end() && it->second.is_live;
}

std::int64_t RelaxationOracle::live_after(const ItemInfo& y) const {
  const std::size_t scope = disc_ == Discipline::central_k ? 0 : y.place;
  const Fenwick& f = scopes_[scope];
  return f.total - f.prefix(y.seq + 1);
}

bool RelaxationOracle::ignorable(const ItemInfo& y) const {
  return live_after(y) < static_cast<std::int64_t>(y.k);
}

bool RelaxationOracle::legal_pop(std::uint64_t id) const {
  auto it = items_.find(id);
  if (it == items_.end() || !it->second.is_live) return false;
  const double key = it->second.key;
  for (auto li = by_key_.begin(); li != by_key_.end() && li->first < key;
       ++li) {
    if (!ignorable(items_.at(li->second))) return false;
  }
  return true;
}

std::vector<std::uint64_t> RelaxationOracle::legal_set() const {
  std::vector<std::uint64_t> out;
  bool bad_below = false;  // a non-ignorable item with a strictly better key
  auto it = by_key_.begin();
  while (it != by_key_.end()) {
    const double key = it->first;
    auto group_end = it;
    bool group_bad = false;
    while (group_end != by_key_.end() && group_end->first == key) {
      if (!ignorable(items_.at(group_end->second))) group_bad = true;
      ++group_end;
    }
    if (!bad_below)
      for (auto g = it; g != group_end; ++g) out.push_back(g->second);
    bad_below = bad_below || group_bad;
    it = group_end;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::uint64_t> legal_set_oracle(
    const std::vector<TraceEvent>& trace, Discipline d) {
  RelaxationOracle oracle(d);
  for (const TraceEvent& ev : trace) {
    if (ev.is_push)
      oracle.on_push(ev.place, ev.id, ev.key, ev.k);
    else if (ev.result != kNoPopResult)
      oracle.on_pop(ev.result);
  }
  return oracle.legal_set();
}

// ---------------------------------------------------------------------------
// Trace serialization

std::string trace_to_csv(const std::vector<TraceEvent>& trace) {
  std::string out = "op,place,id,key,k,result,timestamp\n";
  char buf[160];
  for (const TraceEvent& ev : trace) {
    if (ev.is_push) {
      std::snprintf(buf, sizeof buf, "push,%u,%llu,%.17g,%u,,%llu\n", ev.place,
                    static_cast<unsigned long long>(ev.id), ev.key, ev.k,
                    static_cast<unsigned long long>(ev.timestamp));
    } else if (ev.result == kNoPopResult) {
      std::snprintf(buf, sizeof buf, "pop,%u,,,,none,%llu\n", ev.place,
                    static_cast<unsigned long long>(ev.timestamp));
    } else {
      std::snprintf(buf, sizeof buf, "pop,%u,,,,%llu,%llu\n", ev.place,
                    static_cast<unsigned long long>(ev.result),
                    static_cast<unsigned long long>(ev.timestamp));
    }
    out += buf;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sequential audit driver

AuditResult sequential_audit(Backend& backend, Discipline d, std::uint64_t ops,
                             std::uint64_t seed, const AuditTuning& tuning) {
  if (tuning.k_mix.empty())
    throw std::invalid_argument("audit: empty k mix");
  if (!(tuning.push_prob >= 0.0 && tuning.push_prob <= 1.0))
    throw std::invalid_argument("audit: push_prob out of range");

  RelaxationOracle oracle(d);
  Rng rng(seed);
  std::vector<TraceEvent> trace;
  trace.reserve(ops);
  AuditResult res;
  std::uint64_t next_id = 0;

  for (std::uint64_t op = 0; op < ops; ++op) {
    const bool do_push =
        oracle.live_count() == 0 || rng.unit() < tuning.push_prob;
    TraceEvent ev;
    ev.place = static_cast<PlaceId>(rng.bounded(backend.places()));
    ev.timestamp = op;
    if (do_push) {
      ev.is_push = true;
      ev.id = next_id++;
      ev.key = rng.unit() * 100.0;
      ev.k = tuning.k_mix[rng.bounded(tuning.k_mix.size())];
      Task t;
      t.key = ev.key;
      t.id = ev.id;
      t.k = ev.k + tuning.backend_k_bias;
      backend.push(ev.place, ev.k + tuning.backend_k_bias, t);
      oracle.on_push(ev.place, ev.id, ev.key, ev.k);
      trace.push_back(ev);
      continue;
    }
    const std::optional<Task> got = backend.pop(ev.place);
    ev.result = got ? got->id : kNoPopResult;
    trace.push_back(ev);
    if (!got) continue;
    res.pops_succeeded += 1;
    char msg[256];
    if (!oracle.live(got->id)) {
      std::snprintf(msg, sizeof msg,
                    "op %llu: pop returned id %llu which is not live",
                    static_cast<unsigned long long>(op),
                    static_cast<unsigned long long>(got->id));
      res.failure = msg;
      res.counterexample = std::move(trace);
      return res;
    }
    if (!oracle.legal_pop(got->id)) {
      std::snprintf(msg, sizeof msg,
                    "op %llu: pop returned id %llu (key %.6f) while a better "
                    "live item was outside its hold-back window",
                    static_cast<unsigned long long>(op),
                    static_cast<unsigned long long>(got->id), got->key);
      res.failure = msg;
      res.counterexample = std::move(trace);
      return res;
    }
    oracle.on_pop(got->id);
  }
  res.pass = true;
  return res;
}

// ---------------------------------------------------------------------------
// Concurrent stress

namespace {

struct WorkerLog {
  std::vector<std::uint64_t> pushed;
  std::vector<std::uint64_t> consumed;
};

struct StressShared {
  std::atomic<std::uint64_t> next_id{0};
  std::atomic<std::int64_t> in_flight{0};
  std::atomic<bool> abort{false};
  std::chrono::steady_clock::time_point deadline;
  bool has_deadline = false;
};

std::unique_ptr<Backend> make_stress_backend(const StressOptions& o) {
  switch (o.kind) {
    case BackendKind::ws:
      return std::make_unique<WsBackend>(o.places, o.seed);
    case BackendKind::central:
      return std::make_unique<CentralBackend>(
          o.places, o.k_max, o.seed, std::max<std::uint32_t>(4096, o.k_max));
    case BackendKind::hybrid:
      return std::make_unique<HybridBackend>(o.places, o.k_max, o.seed);
  }
  throw std::invalid_argument("stress: unknown backend kind");
}

void stress_worker(Backend& backend, const StressOptions& o, PlaceId w,
                   std::uint64_t freeze_point, StressShared& sh,
                   WorkerLog& log) {
  Rng rng(o.seed ^ (0x9e3779b97f4a7c15ull * (w + 1)));
  const bool freeze_me = o.freeze_one && w == 1 % o.places;
  auto quiescent = [&] {
    return sh.in_flight.load(std::memory_order_acquire) == 0 &&
           sh.next_id.load(std::memory_order_acquire) >= o.tasks;
  };
  std::uint64_t idle = 0;
  for (;;) {
    if (sh.abort.load(std::memory_order_relaxed)) return;
    if (freeze_me &&
        sh.next_id.load(std::memory_order_relaxed) >= freeze_point) {
      // Cooperative park at an operation boundary: nothing popped, nothing
      // pending. The rest of the crew must finish without us.
      while (!quiescent() && !sh.abort.load(std::memory_order_relaxed))
        std::this_thread::sleep_for(std::chrono::microseconds(200));
      return;
    }
    const std::optional<Task> got = backend.pop(w);
    if (got) {
      idle = 0;
      log.consumed.push_back(got->id);
      for (int c = 0; c < 2; ++c) {
        const std::uint64_t id =
            sh.next_id.fetch_add(1, std::memory_order_acq_rel);
        if (id >= o.tasks) break;
        sh.in_flight.fetch_add(1, std::memory_order_acq_rel);
        Task child;
        child.key = got->key + rng.unit();
        child.id = id;
        child.k = o.k_mix[rng.bounded(o.k_mix.size())];
        backend.push(w, child.k, child);
        log.pushed.push_back(id);
      }
      sh.in_flight.fetch_sub(1, std::memory_order_acq_rel);
      continue;
    }
    if (quiescent()) return;
    ++idle;
    if ((idle & 1023) == 0 && sh.has_deadline &&
        std::chrono::steady_clock::now() > sh.deadline) {
      sh.abort.store(true, std::memory_order_release);
      return;
    }
    if ((idle & 15) == 0) std::this_thread::yield();
  }
}

}  // namespace

StressResult concurrent_stress(const StressOptions& opts) {
  if (opts.places < 2)
    throw std::invalid_argument("stress: need at least 2 places");
  if (opts.tasks < opts.places)
    throw std::invalid_argument("stress: fewer tasks than places");
  if (opts.k_mix.empty())
    throw std::invalid_argument("stress: empty k mix");

  std::unique_ptr<Backend> backend = make_stress_backend(opts);
  StressShared sh;
  std::vector<WorkerLog> logs(opts.places);

  // Freeze point: a push-progress mark inside [10%, 50%) of the budget, so
  // at least half the workload lands after the park.
  Rng fz(opts.seed ^ 0xfeedfacecafef00dull);
  const std::uint64_t freeze_point =
      opts.tasks / 10 + fz.bounded(std::max<std::uint64_t>(1, opts.tasks * 2 / 5));

  // Roots, one per place, pushed before any worker exists.
  for (PlaceId p = 0; p < opts.places; ++p) {
    Task root;
    root.key = 1.0 + p;
    root.id = p;
    root.k = opts.k_mix[p % opts.k_mix.size()];
    backend->push(p, root.k, root);
    logs[p].pushed.push_back(p);
  }
  sh.next_id.store(opts.places, std::memory_order_release);
  sh.in_flight.store(static_cast<std::int64_t>(opts.places),
                     std::memory_order_release);
  if (opts.budget_ms > 0) {
    sh.has_deadline = true;
    sh.deadline = std::chrono::steady_clock::now() +
                  std::chrono::milliseconds(opts.budget_ms);
  }

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::thread> crew;
  crew.reserve(opts.places);
  for (PlaceId w = 0; w < opts.places; ++w)
    crew.emplace_back(stress_worker, std::ref(*backend), std::cref(opts), w,
                      freeze_point, std::ref(sh), std::ref(logs[w]));
  for (std::thread& th : crew) th.join();
  const auto t1 = std::chrono::steady_clock::now();

  StressResult res;
  res.elapsed_ms =
      std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(
          t1 - t0)
          .count();
  res.timed_out = sh.abort.load(std::memory_order_acquire);

  std::vector<std::uint64_t> pushed, consumed;
  for (const WorkerLog& lg : logs) {
    pushed.insert(pushed.end(), lg.pushed.begin(), lg.pushed.end());
    consumed.insert(consumed.end(), lg.consumed.begin(), lg.consumed.end());
  }
  std::sort(pushed.begin(), pushed.end());
  std::sort(consumed.begin(), consumed.end());
  res.pushed = pushed.size();
  res.consumed = consumed.size();

  // Multiset walk: every pushed id consumed exactly once, nothing phantom.
  std::uint64_t phantom = 0;
  std::size_t pi = 0, ci = 0;
  while (pi < pushed.size() || ci < consumed.size()) {
    if (ci == consumed.size()) {
      res.missing += pushed.size() - pi;
      break;
    }
    if (pi == pushed.size()) {
      phantom += consumed.size() - ci;
      break;
    }
    if (pushed[pi] == consumed[ci]) {
      ++pi;
      ++ci;
      while (ci < consumed.size() && consumed[ci] == consumed[ci - 1]) {
        ++res.duplicates;
        ++ci;
      }
    } else if (pushed[pi] < consumed[ci]) {
      ++res.missing;
      ++pi;
    } else {
      ++phantom;
      ++ci;
    }
  }
  res.duplicates += phantom;

  res.pass = !res.timed_out && res.duplicates == 0 && res.missing == 0 &&
             res.pushed == res.consumed;
  if (!res.pass) {
    char buf[224];
    std::snprintf(buf, sizeof buf,
                  "pushed %llu consumed %llu duplicates %llu missing %llu%s",
                  static_cast<unsigned long long>(res.pushed),
                  static_cast<unsigned long long>(res.consumed),
                  static_cast<unsigned long long>(res.duplicates),
                  static_cast<unsigned long long>(res.missing),
                  res.timed_out ? " (wall-clock budget exceeded)" : "");
    res.detail = buf;
  }
  return res;
}

}  // namespace kprio
