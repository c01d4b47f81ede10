// Drives step machines under random, replayed, adversarial, or exhaustive
// interleavings. One scheduling step is one cell access.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wfreg/constructions.hpp"
#include "wfreg/memory.hpp"
#include "wfreg/trace.hpp"
#include "wfreg/verdict.hpp"

namespace wfreg {

/// Memory plus one process per reader and the writer, each executing its
/// queued operations sequentially.
class Simulation {
 public:
  explicit Simulation(Workload w)
      : workload_(std::move(w)),
        memory_((workload_.validate(), workload_.n), workload_.domain(), workload_.construction) {
    procs_.resize(static_cast<std::size_t>(workload_.n + 1));
    for (int i = 0; i < workload_.n; ++i) procs_[static_cast<std::size_t>(i)].reads_left = workload_.reads_per_reader;
    writer().writes_left.assign(workload_.writes.begin(), workload_.writes.end());
  }

  const Workload& workload() const { return workload_; }
  const Memory& memory() const { return memory_; }
  const std::vector<int>& steps_taken() const { return steps_; }

  /// Runs the initializing Write alone. Must precede every other step.
  void run_initial_write() {
    if (initialized_) throw std::logic_error("initial Write already ran");
    do {
      advance(workload_.n);
    } while (writer().active);
    initialized_ = true;
  }

  bool has_work(int pid) const {
    const Process& p = procs_[static_cast<std::size_t>(pid)];
    return p.active || !p.writes_left.empty() || p.reads_left > 0;
  }

  bool in_operation(int pid) const { return procs_[static_cast<std::size_t>(pid)].active.has_value(); }

  /// Processes with a pending step, in ascending index order.
  std::vector<int> enabled() const {
    std::vector<int> out;
    for (int p = 0; p <= workload_.n; ++p) {
      if (has_work(p)) out.push_back(p);
    }
    return out;
  }

  /// Remaining cell accesses of `pid`, counting each queued operation at its bound.
  int remaining_bound(int pid) const {
    const Process& p = procs_[static_cast<std::size_t>(pid)];
    const Construction c = workload_.construction;
    const OpKind kind = pid == workload_.n ? OpKind::write : OpKind::read;
    const int per_op = step_bound(c, kind, workload_.n);
    int total = kind == OpKind::write ? per_op * static_cast<int>(p.writes_left.size()) : per_op * p.reads_left;
    if (p.active) total += per_op - result(*p.active).steps;
    return total;
  }

  void step(int pid) {
    if (!initialized_) throw std::logic_error("run_initial_write() first");
    if (pid < 0 || pid > workload_.n || !has_work(pid)) {
      throw std::invalid_argument("process " + std::to_string(pid) + " has no pending step");
    }
    advance(pid);
    steps_.push_back(pid);
  }

  Trace trace(ScheduleSpec spec) const { return Trace{workload_, std::move(spec), memory_.log()}; }

  struct Checkpoint;

  Checkpoint checkpoint() const;
  void restore(const Checkpoint& c);

 private:
  struct Process {
    std::deque<Value> writes_left;
    int reads_left = 0;
    std::optional<Machine> active;
    OpId op = 0;
    WriterStatics statics;
  };

  Process& writer() { return procs_[static_cast<std::size_t>(workload_.n)]; }

  void advance(int pid) {
    Process& p = procs_[static_cast<std::size_t>(pid)];
    const Construction c = workload_.construction;
    if (!p.active) {
      p.op = next_op_++;
      if (pid == workload_.n) {
        const Value v = p.writes_left.front();
        p.writes_left.pop_front();
        p.active = make_write(c, workload_.n, v, p.op, workload_.mutation, p.statics);
        memory_.log_invoke({pid}, p.op, OpKind::write, v);
      } else {
        --p.reads_left;
        p.active = make_read(c, workload_.n, pid, p.op, workload_.mutation);
        memory_.log_invoke({pid}, p.op, OpKind::read, 0);
      }
    }
    if (wfreg::step(*p.active, memory_)) {
      const OpResult r = result(*p.active);
      if (auto s = writer_statics(*p.active)) p.statics = *s;
      memory_.log_respond({pid}, p.op, r.kind, r.value, r.steps, r.read_case, r.ghost);
      p.active.reset();
    }
  }

  Workload workload_;
  Memory memory_;
  std::vector<Process> procs_;
  std::vector<int> steps_;
  OpId next_op_ = 0;
  bool initialized_ = false;
};

struct Simulation::Checkpoint {
  Memory::Snapshot memory;
  std::size_t steps = 0;
  OpId next_op = 0;
  std::vector<Process> procs;
};

inline Simulation::Checkpoint Simulation::checkpoint() const {
  return {memory_.snapshot(), steps_.size(), next_op_, procs_};
}

inline void Simulation::restore(const Checkpoint& c) {
  memory_.restore(c.memory);
  steps_.resize(c.steps);
  next_op_ = c.next_op;
  procs_ = c.procs;
}

// ---------------------------------------------------------------------------

/// Picks uniformly among the enabled processes until none remains.
inline Trace run_random(const Workload& w, std::uint64_t seed) {
  Simulation sim(w);
  sim.run_initial_write();
  std::mt19937_64 rng(seed);
  for (auto en = sim.enabled(); !en.empty(); en = sim.enabled()) {
    sim.step(en[static_cast<std::size_t>(rng() % en.size())]);
  }
  ScheduleSpec spec;
  spec.mode = ScheduleSpec::Mode::random;
  spec.seed = seed;
  return sim.trace(spec);
}

/// Replays an explicit schedule, then finishes any leftover work by
/// running the lowest-indexed enabled process.
inline Trace run_schedule(const Workload& w, std::span<const int> steps, bool finish = true) {
  Simulation sim(w);
  sim.run_initial_write();
  for (int pid : steps) sim.step(pid);
  if (finish) {
    for (auto en = sim.enabled(); !en.empty(); en = sim.enabled()) sim.step(en.front());
  }
  ScheduleSpec spec;
  spec.mode = ScheduleSpec::Mode::replay;
  spec.steps.assign(steps.begin(), steps.end());
  return sim.trace(spec);
}

/// A stalling strategy. With `solo` set only that process ever runs;
/// otherwise the `stalled` processes stop for good after `cut` steps, possibly
/// in the middle of an operation. Remaining choices are random.
struct Adversary {
  std::optional<int> solo;
  std::vector<int> stalled;
  std::uint64_t cut = 0;
  std::uint64_t seed = 0;

  static Adversary stall_all_but(int pid, std::uint64_t seed = 0) { return {pid, {}, 0, seed}; }
  static Adversary stall_after(std::vector<int> pids, std::uint64_t cut, std::uint64_t seed = 0) {
    return {std::nullopt, std::move(pids), cut, seed};
  }
};

inline Trace run_adversary(const Workload& w, const Adversary& adv) {
  Simulation sim(w);
  sim.run_initial_write();
  std::mt19937_64 rng(adv.seed);
  auto allowed = [&](int pid, std::uint64_t taken) {
    if (adv.solo) return pid == *adv.solo;
    if (taken < adv.cut) return true;
    return std::find(adv.stalled.begin(), adv.stalled.end(), pid) == adv.stalled.end();
  };
  for (std::uint64_t taken = 0;; ++taken) {
    std::vector<int> en;
    for (int pid : sim.enabled()) {
      if (allowed(pid, taken)) en.push_back(pid);
    }
    if (en.empty()) break;
    sim.step(en[static_cast<std::size_t>(rng() % en.size())]);
  }
  ScheduleSpec spec;
  spec.mode = ScheduleSpec::Mode::adversary;
  spec.seed = adv.seed;
  spec.stalled = adv.stalled;
  spec.cut = adv.cut;
  spec.solo = adv.solo;
  return sim.trace(spec);
}

// ---------------------------------------------------------------------------

/// Raised before exploring when the schedule-count estimate exceeds the
/// ceiling, or during exploration when the actual count does.
class CeilingExceeded : public std::runtime_error {
 public:
  CeilingExceeded(double estimate, std::uint64_t ceiling)
      : std::runtime_error("exhaustive exploration refused: about " + format(estimate) +
                           " schedules exceeds ceiling " + std::to_string(ceiling)),
        estimate_(estimate) {}
  double estimate() const { return estimate_; }

 private:
  static std::string format(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
  }
  double estimate_;
};

struct ExploreOptions {
  std::uint64_t ceiling = 10'000'000;
  bool stop_on_first_failure = false;
};

struct ExploreSummary {
  std::uint64_t schedules = 0;
  std::uint64_t passed = 0;
  std::uint64_t failed = 0;
  double estimate = 0;
  std::optional<std::vector<int>> counterexample;  // replayable with run_schedule
  std::string counterexample_detail;

  std::uint64_t failures() const { return failed; }
};

using TraceCheck = std::function<Verdict(const Trace&)>;

/// Upper bound on the number of interleavings once the initializing Write
/// finished: the multinomial over each process's worst-case step total.
inline double estimate_schedules(const Workload& w) {
  Simulation sim(w);
  sim.run_initial_write();
  double log_count = 0;
  int total = 0;
  for (int pid = 0; pid <= w.n; ++pid) {
    const int s = sim.remaining_bound(pid);
    total += s;
    log_count -= std::lgamma(s + 1.0);
  }
  log_count += std::lgamma(total + 1.0);
  return std::exp(log_count);
}

/// Depth-first enumeration of every interleaving after the initializing
/// Write. `check` runs on each complete trace.
inline ExploreSummary explore_exhaustive(const Workload& w, const TraceCheck& check,
                                         const ExploreOptions& opts = {}) {
  ExploreSummary summary;
  summary.estimate = estimate_schedules(w);
  if (summary.estimate > static_cast<double>(opts.ceiling) * 1.0000001) {
    throw CeilingExceeded(summary.estimate, opts.ceiling);
  }
  Simulation sim(w);
  sim.run_initial_write();
  bool stop = false;

  std::function<void()> dfs = [&] {
    const std::vector<int> en = sim.enabled();
    if (en.empty()) {
      if (++summary.schedules > opts.ceiling) throw CeilingExceeded(static_cast<double>(summary.schedules), opts.ceiling);
      ScheduleSpec spec;
      spec.steps = sim.steps_taken();
      const Verdict v = check(sim.trace(spec));
      if (v.passed()) {
        ++summary.passed;
      } else {
        ++summary.failed;
        if (!summary.counterexample) {
          summary.counterexample = sim.steps_taken();
          summary.counterexample_detail = v.check + ": " + v.detail;
        }
        if (opts.stop_on_first_failure) stop = true;
      }
      return;
    }
    if (en.size() == 1) {  // the caller restores
      sim.step(en.front());
      dfs();
      return;
    }
    const auto cp = sim.checkpoint();
    for (int pid : en) {
      if (stop) return;
      sim.step(pid);
      dfs();
      sim.restore(cp);
    }
  };
  dfs();
  return summary;
}

}  // namespace wfreg
