// Hand-built operation histories for checker tests: invoke/respond events
// only, no cell accesses.
#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "wfreg/trace.hpp"

namespace wfreg::testing {

class History {
 public:
  explicit History(int n = 1) {
    t_.workload.construction = Construction::c1;
    t_.workload.n = n;
    t_.workload.value_domain = 16;
  }

  OpId invoke_write(Value v) {
    t_.workload.writes.push_back(v);
    return invoke(t_.workload.n, OpKind::write, v);
  }
  OpId invoke_read(int reader) { return invoke(reader, OpKind::read, 0); }

  History& respond(OpId op, std::optional<Value> result = std::nullopt, GhostSeq ghost = 0) {
    Event e;
    e.seq = t_.events.size();
    e.pid = pids_.at(op);
    e.op = op;
    e.kind = EventKind::respond;
    e.op_kind = kinds_.at(op);
    e.result = result;
    e.ghost = ghost;
    t_.events.push_back(e);
    return *this;
  }

  OpId write(Value v) {
    const OpId op = invoke_write(v);
    respond(op);
    return op;
  }
  OpId read(int reader, Value result) {
    const OpId op = invoke_read(reader);
    respond(op, result);
    return op;
  }

  const Trace& trace() const { return t_; }

 private:
  OpId invoke(int pid, OpKind kind, Value arg) {
    const OpId op = static_cast<OpId>(pids_.size());
    Event e;
    e.seq = t_.events.size();
    e.pid = {pid};
    e.op = op;
    e.kind = EventKind::invoke;
    e.op_kind = kind;
    e.arg = arg;
    t_.events.push_back(e);
    pids_.push_back({pid});
    kinds_.push_back(kind);
    return op;
  }

  Trace t_;
  std::vector<ProcessId> pids_;
  std::vector<OpKind> kinds_;
};

/// Linearizability by trying every permutation of the complete operations.
/// Independent of the library's search; only for a handful of operations.
inline bool brute_force_linearizable(const std::vector<OperationView>& all) {
  std::vector<OperationView> ops;
  for (const auto& op : all) {
    if (op.complete()) ops.push_back(op);
  }
  std::vector<std::size_t> perm(ops.size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    std::optional<Value> current;
    for (std::size_t a = 0; a < perm.size() && ok; ++a) {
      for (std::size_t b = a + 1; b < perm.size() && ok; ++b) {
        if (precedes(ops[perm[b]], ops[perm[a]])) ok = false;
      }
    }
    for (std::size_t k = 0; k < perm.size() && ok; ++k) {
      const auto& op = ops[perm[k]];
      if (op.kind == OpKind::write) {
        current = op.value;
      } else if (current != op.value) {
        ok = false;
      }
    }
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

}  // namespace wfreg::testing
