// Workloads, schedules, traces, and the operation view of a trace.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wfreg/memory.hpp"
#include "wfreg/types.hpp"

namespace wfreg {

/// What a run executes. `writes` includes the initializing Write, which
/// completes before any other operation starts.
struct Workload {
  Construction construction = Construction::c1;
  int n = 1;
  std::vector<Value> writes;
  int reads_per_reader = 0;
  int value_domain = 0;  // 0: one more than the largest written value
  Mutation mutation = Mutation::none;

  int domain() const {
    if (value_domain > 0) return value_domain;
    Value hi = 0;
    for (Value v : writes) hi = std::max(hi, v);
    return hi + 1;
  }

  void validate() const {
    if (n < 1) throw std::invalid_argument("n must be at least 1");
    if (writes.empty()) throw std::invalid_argument("workload needs an initializing Write");
    if (reads_per_reader < 0) throw std::invalid_argument("reads per reader must be nonnegative");
    if (value_domain < 0) throw std::invalid_argument("value domain must be positive");
    for (Value v : writes) {
      if (v < 0 || v >= domain()) {
        throw std::invalid_argument("written value " + std::to_string(v) + " outside value domain");
      }
    }
    if (is_bounded(construction) && n > 60) throw std::invalid_argument("n too large for field encoding");
  }

  friend bool operator==(const Workload&, const Workload&) = default;
};

/// `write_count` Writes of the distinct values 1..write_count.
inline Workload make_workload(Construction c, int n, int write_count, int reads_per_reader,
                              Mutation m = Mutation::none) {
  Workload w;
  w.construction = c;
  w.n = n;
  for (int k = 1; k <= write_count; ++k) w.writes.push_back(k);
  w.reads_per_reader = reads_per_reader;
  w.mutation = m;
  return w;
}

/// How the interleaving of a trace was chosen.
struct ScheduleSpec {
  enum class Mode : std::uint8_t { random, replay, adversary };

  Mode mode = Mode::replay;
  std::uint64_t seed = 0;
  std::vector<int> steps;    // replay: pid chosen at each step after initialization
  std::vector<int> stalled;  // adversary: never scheduled once `cut` steps were taken
  std::uint64_t cut = 0;
  std::optional<int> solo;   // adversary: only this process runs

  friend bool operator==(const ScheduleSpec&, const ScheduleSpec&) = default;
};

constexpr std::string_view to_string(ScheduleSpec::Mode m) {
  switch (m) {
    case ScheduleSpec::Mode::random: return "random";
    case ScheduleSpec::Mode::replay: return "replay";
    case ScheduleSpec::Mode::adversary: return "adversary";
  }
  return "?";
}

struct Trace {
  Workload workload;
  ScheduleSpec schedule;
  std::vector<Event> events;

  /// Process stepped at each access after the initializing Write responded.
  std::vector<int> schedule_taken() const {
    std::vector<int> out;
    bool init_done = false;
    for (const Event& e : events) {
      if (e.kind == EventKind::respond && e.op == 0) init_done = true;
      if (init_done && (e.kind == EventKind::cell_read || e.kind == EventKind::cell_write)) {
        out.push_back(e.pid.index);
      }
    }
    return out;
  }

  friend bool operator==(const Trace&, const Trace&) = default;
};

/// One operation of a trace, as seen by the checkers.
struct OperationView {
  OpId id = 0;
  ProcessId pid;
  OpKind kind = OpKind::write;
  Value value = 0;  // written value, or value returned
  Seq invoke = 0;
  std::optional<Seq> respond;
  GhostSeq ghost = 0;  // Write performed, or Write whose value was returned
  std::optional<ReadCase> read_case;
  int steps = 0;  // cell accesses performed so far

  bool complete() const { return respond.has_value(); }
};

/// a precedes b: every event of a is before every event of b.
inline bool precedes(const OperationView& a, const OperationView& b) {
  return a.respond && *a.respond < b.invoke;
}

inline std::vector<OperationView> operations(const Trace& t) {
  std::map<OpId, OperationView> ops;
  GhostSeq writes_seen = 0;
  for (const Event& e : t.events) {
    switch (e.kind) {
      case EventKind::invoke: {
        OperationView& op = ops[e.op];
        op.id = e.op;
        op.pid = e.pid;
        op.kind = e.op_kind;
        op.invoke = e.seq;
        if (e.op_kind == OpKind::write) {
          op.value = e.arg;
          op.ghost = ++writes_seen;
        }
        break;
      }
      case EventKind::respond: {
        auto it = ops.find(e.op);
        if (it == ops.end()) throw std::invalid_argument("respond without invoke for op " + std::to_string(e.op));
        OperationView& op = it->second;
        op.respond = e.seq;
        if (op.kind == OpKind::read) {
          if (!e.result) throw std::invalid_argument("Read response without value");
          op.value = *e.result;
          op.ghost = e.ghost;
        }
        op.read_case = e.read_case;
        break;
      }
      case EventKind::cell_read:
      case EventKind::cell_write: {
        auto it = ops.find(e.op);
        if (it == ops.end()) throw std::invalid_argument("access outside any operation");
        ++it->second.steps;
        break;
      }
    }
  }
  std::vector<OperationView> out;
  out.reserve(ops.size());
  for (auto& [id, op] : ops) out.push_back(op);
  return out;
}

/// Accesses of one operation in trace order.
inline std::vector<const Event*> accesses_of(const Trace& t, OpId op) {
  std::vector<const Event*> out;
  for (const Event& e : t.events) {
    if (e.op == op && (e.kind == EventKind::cell_read || e.kind == EventKind::cell_write)) out.push_back(&e);
  }
  return out;
}

}  // namespace wfreg
