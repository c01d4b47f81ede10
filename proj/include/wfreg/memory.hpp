// Substrate of atomic 1-writer 1-reader cells with a global event log.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wfreg/types.hpp"

namespace wfreg {

/// Raised when a process touches a cell outside its role, or with the
/// wrong arity. Aborts the run.
class ModelViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class EventKind : std::uint8_t { invoke, respond, cell_read, cell_write };

constexpr std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::invoke: return "invoke";
    case EventKind::respond: return "respond";
    case EventKind::cell_read: return "cell-read";
    case EventKind::cell_write: return "cell-write";
  }
  return "?";
}

/// One entry of the totally ordered event log.
///
/// Access events use `cell`, `line` and `payload`. Invoke events use
/// `op_kind` and `arg` (Writes). Respond events use `result` (Reads),
/// `steps`, `read_case` (bounded Reads) and `ghost`.
struct Event {
  Seq seq = 0;
  ProcessId pid;
  OpId op = 0;
  EventKind kind = EventKind::invoke;

  CellId cell;
  Line line = Line::none;
  CellContent payload;

  OpKind op_kind = OpKind::write;
  Value arg = 0;

  std::optional<Value> result;
  int steps = 0;
  std::optional<ReadCase> read_case;
  GhostSeq ghost = 0;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Tags an access with the operation and program line performing it.
struct AccessTag {
  OpId op = 0;
  Line line = Line::none;
};

/// Initial record of every cell owned by `owner` under construction `c`.
inline Record initial_record(Construction c, int owner, int n) {
  Record r;
  if (c == Construction::c2) {
    r.value.reset();
    if (owner == n) r.replicas = ReplicaSlots{};
  }
  return r;
}

/// The (n+1)^2 cells R[i][j], i,j in 0..n. R[i][n] with i < n hold two records.
class Memory {
 public:
  Memory(int n, int value_domain, Construction construction)
      : n_(n), value_domain_(value_domain), construction_(construction) {
    if (n < 1) throw std::invalid_argument("reader count n must be at least 1");
    if (value_domain < 1) throw std::invalid_argument("value domain size must be at least 1");
    cells_.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        const Record init = initial_record(construction, i, n);
        cells_.push_back(is_merged(cell(i, j)) ? CellContent(init, init) : CellContent(init));
      }
    }
  }

  int readers() const { return n_; }
  ProcessId writer() const { return {n_}; }
  int value_domain() const { return value_domain_; }
  Construction construction() const { return construction_; }

  bool contains(CellId id) const {
    return id.owner.index >= 0 && id.owner.index <= n_ && id.reader.index >= 0 &&
           id.reader.index <= n_;
  }
  bool is_merged(CellId id) const { return id.owner.index < n_ && id.reader.index == n_; }
  std::size_t arity(CellId id) const { return is_merged(id) ? 2 : 1; }

  std::size_t cell_count() const { return cells_.size(); }

  CellContent read(ProcessId pid, CellId id, AccessTag tag = {}) {
    check_cell(id);
    if (pid != id.reader) {
      throw ModelViolation("process " + std::to_string(pid.index) + " read R[" +
                           std::to_string(id.owner.index) + "][" +
                           std::to_string(id.reader.index) + "] whose reader is " +
                           std::to_string(id.reader.index));
    }
    const CellContent& content = cells_[index(id)];
    Event e;
    e.seq = next_seq();
    e.pid = pid;
    e.op = tag.op;
    e.kind = EventKind::cell_read;
    e.cell = id;
    e.line = tag.line;
    e.payload = content;
    log_.push_back(e);
    return content;
  }

  void write(ProcessId pid, CellId id, const CellContent& content, AccessTag tag = {}) {
    check_cell(id);
    if (pid != id.owner) {
      throw ModelViolation("process " + std::to_string(pid.index) + " wrote R[" +
                           std::to_string(id.owner.index) + "][" +
                           std::to_string(id.reader.index) + "] whose owner is " +
                           std::to_string(id.owner.index));
    }
    if (content.size() != arity(id)) {
      throw ModelViolation("arity mismatch writing R[" + std::to_string(id.owner.index) + "][" +
                           std::to_string(id.reader.index) + "]: cell holds " +
                           std::to_string(arity(id)) + " record(s), got " +
                           std::to_string(content.size()));
    }
    cells_[index(id)] = content;
    Event e;
    e.seq = next_seq();
    e.pid = pid;
    e.op = tag.op;
    e.kind = EventKind::cell_write;
    e.cell = id;
    e.line = tag.line;
    e.payload = content;
    log_.push_back(e);
  }

  /// Current content without logging; for verification code only.
  const CellContent& peek(CellId id) const {
    check_cell(id);
    return cells_[index(id)];
  }

  void log_invoke(ProcessId pid, OpId op, OpKind kind, Value arg) {
    Event e;
    e.seq = next_seq();
    e.pid = pid;
    e.op = op;
    e.kind = EventKind::invoke;
    e.op_kind = kind;
    e.arg = arg;
    log_.push_back(e);
  }

  void log_respond(ProcessId pid, OpId op, OpKind kind, std::optional<Value> result, int steps,
                   std::optional<ReadCase> read_case, GhostSeq ghost) {
    Event e;
    e.seq = next_seq();
    e.pid = pid;
    e.op = op;
    e.kind = EventKind::respond;
    e.op_kind = kind;
    e.result = result;
    e.steps = steps;
    e.read_case = read_case;
    e.ghost = ghost;
    log_.push_back(e);
  }

  const std::vector<Event>& log() const { return log_; }

  struct Snapshot {
    std::vector<CellContent> cells;
    std::size_t log_size = 0;
  };

  Snapshot snapshot() const { return {cells_, log_.size()}; }
  void restore(const Snapshot& s) {
    cells_ = s.cells;
    log_.resize(s.log_size);
  }

 private:
  std::size_t index(CellId id) const {
    return static_cast<std::size_t>(id.owner.index * (n_ + 1) + id.reader.index);
  }
  void check_cell(CellId id) const {
    if (!contains(id)) throw ModelViolation("no such cell");
  }
  Seq next_seq() const { return static_cast<Seq>(log_.size()); }

  int n_;
  int value_domain_;
  Construction construction_;
  std::vector<CellContent> cells_;
  std::vector<Event> log_;
};

inline Memory build_memory(int n, int value_domain, Construction c = Construction::c1) {
  return Memory(n, value_domain, c);
}

/// Structural counts of a memory, under both counting conventions.
struct Census {
  std::size_t cells = 0;
  std::size_t two_record_cells = 0;
  std::size_t records = 0;
  std::size_t writer_value_fields = 0;
  std::size_t reader_value_fields = 0;

  std::size_t value_fields() const { return writer_value_fields + reader_value_fields; }
};

inline Census census(const Memory& mem) {
  Census c;
  const int n = mem.readers();
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      const CellContent& content = mem.peek(cell(i, j));
      ++c.cells;
      if (content.size() == 2) ++c.two_record_cells;
      for (const Record& r : content.records()) {
        ++c.records;
        std::size_t fields = (r.value ? 1 : 0) + (r.replicas ? 2 : 0);
        (i == n ? c.writer_value_fields : c.reader_value_fields) += fields;
      }
    }
  }
  return c;
}

}  // namespace wfreg
