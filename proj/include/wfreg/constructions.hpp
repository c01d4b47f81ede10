// The register constructions as resumable step machines.
//
// A machine performs exactly one cell access per call to step(); the local
// computation that follows an access is folded into that same step. Every
// machine is loop-free, so it finishes within a fixed number of steps.
#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "wfreg/memory.hpp"
#include "wfreg/timestamp.hpp"
#include "wfreg/types.hpp"

namespace wfreg {

struct OpResult {
  OpKind kind = OpKind::write;
  std::optional<Value> value;  // Reads only
  int steps = 0;
  std::optional<ReadCase> read_case;  // bounded Reads only
  GhostSeq ghost = 0;                 // Write performed, or Write whose value was read
};

/// Writer state that survives between Write invocations.
struct WriterStatics {
  GhostSeq writes_done = 0;
  std::optional<Record> last;  // replica variant: the record last written
  std::uint8_t phase = 1;      // replica variant: field receiving the next value
};

// ---------------------------------------------------------------------------
// Static bounds

/// Maximum number of cell accesses of one operation, for any schedule.
constexpr int step_bound(Construction c, OpKind kind, int n) {
  switch (c) {
    case Construction::c0: return 2 * n + 2;
    case Construction::c1: return kind == OpKind::write ? 2 * n + 2 : 3 * n + 7;
    case Construction::c2: return kind == OpKind::write ? 3 * n + 3 : 3 * n + 7;
  }
  return 0;
}

/// Worst-case access counts of one operation under both conventions:
/// a merged two-record cell counts once as a cell and twice as records.
struct AccessProfile {
  int cell_reads = 0;
  int cell_writes = 0;
  int record_reads = 0;
  int record_writes = 0;

  int cell_accesses() const { return cell_reads + cell_writes; }
  friend bool operator==(const AccessProfile&, const AccessProfile&) = default;
};

constexpr AccessProfile static_access_profile(Construction c, OpKind kind, int n) {
  if (kind == OpKind::write) {
    // scan: n merged cells plus R[n][n]; distribute: R[n][0..n]
    AccessProfile p{n + 1, n + 1, 2 * n + 1, n + 1};
    if (c == Construction::c2) {
      p.cell_writes += n + 1;
      p.record_writes += n + 1;
    }
    return p;
  }
  if (c == Construction::c0) return {n + 1, n + 1, n + 1, n + 2};
  // two own-cell reads, full scan and rescan; announce twice, then distribute
  return {2 * n + 4, n + 3, 2 * n + 4, n + 6};
}

/// Records compared by the bounded Read when it checks whether the writer moved.
///
/// The replica variant compares timestamp and mark only: its writer
/// rewrites the unmarked value field in its deposit pass without starting a new
/// timestamp, and that deposit must not look like a completed Write.
inline bool same_writer_record(Construction c, const Record& a, const Record& b) {
  if (c == Construction::c2 && a.replicas && b.replicas) {
    return a.ts == b.ts && a.replicas->mark == b.replicas->mark;
  }
  return same_payload(a, b);
}

// ---------------------------------------------------------------------------
// Construction 0: unbounded integer tags

class C0Writer {
 public:
  C0Writer(int n, Value v, OpId op, WriterStatics statics)
      : n_(n), value_(v), op_(op), statics_(statics) {}

  bool step(Memory& mem) {
    const ProcessId self{n_};
    ++steps_;
    if (!distributing_) {
      const CellContent c = mem.read(self, cell(j_, n_), {op_, Line::l1});
      max_tag_ = std::max(max_tag_, c[0].tag);
      if (++j_ > n_) {
        out_.value = value_;
        out_.tag = max_tag_ + 1;
        out_.ghost = statics_.writes_done + 1;
        distributing_ = true;
        j_ = 0;
      }
      return false;
    }
    mem.write(self, cell(n_, j_), CellContent(out_), {op_, Line::l4});
    if (++j_ > n_) {
      done_ = true;
      ++statics_.writes_done;
      return true;
    }
    return false;
  }

  bool done() const { return done_; }
  OpResult result() const { return {OpKind::write, std::nullopt, steps_, std::nullopt, out_.ghost}; }
  const WriterStatics& statics() const { return statics_; }

 private:
  int n_;
  Value value_;
  OpId op_;
  WriterStatics statics_;
  int j_ = 0;
  int steps_ = 0;
  bool distributing_ = false;
  bool done_ = false;
  std::uint64_t max_tag_ = 0;
  Record out_;
};

class C0Reader {
 public:
  C0Reader(int n, int i, OpId op, Mutation mutation)
      : n_(n), i_(i), op_(op), from_(static_cast<std::size_t>(n + 1)) {
    for (int j = 0; j <= n; ++j) order_.push_back(j);
    // the writer's cell must be scanned last; the mutation scans it first
    if (mutation == Mutation::c0_writer_first) std::rotate(order_.begin(), order_.end() - 1, order_.end());
  }

  bool step(Memory& mem) {
    const ProcessId self{i_};
    ++steps_;
    if (!distributing_) {
      const int j = order_[static_cast<std::size_t>(k_)];
      from_[static_cast<std::size_t>(j)] = mem.read(self, cell(j, i_), {op_, Line::l1})[0];
      if (++k_ > n_) {
        select();
        distributing_ = true;
        k_ = 0;
      }
      return false;
    }
    const Record& mine = from_[static_cast<std::size_t>(i_)];
    const CellId target = cell(i_, k_);
    mem.write(self, target, mem.is_merged(target) ? CellContent(mine, mine) : CellContent(mine),
              {op_, Line::l4});
    if (++k_ > n_) {
      done_ = true;
      return true;
    }
    return false;
  }

  bool done() const { return done_; }
  OpResult result() const {
    const Record& mine = from_[static_cast<std::size_t>(i_)];
    return {OpKind::read, mine.value, steps_, std::nullopt, mine.ghost};
  }

 private:
  // ties prefer the writer, then the smallest index
  void select() {
    std::size_t best = static_cast<std::size_t>(n_);
    for (std::size_t j = 0; j < static_cast<std::size_t>(n_); ++j) {
      if (from_[j].tag > from_[best].tag) best = j;
    }
    from_[static_cast<std::size_t>(i_)] = from_[best];
  }

  int n_;
  int i_;
  OpId op_;
  std::vector<Record> from_;
  std::vector<int> order_;
  int k_ = 0;
  int steps_ = 0;
  bool distributing_ = false;
  bool done_ = false;
};

// ---------------------------------------------------------------------------
// Constructions 1 and 2: bounded timestamps

class BoundedWriter {
 public:
  BoundedWriter(Construction c, int n, Value v, OpId op, Mutation mutation, WriterStatics statics)
      : c_(c), n_(n), value_(v), op_(op), mutation_(mutation), statics_(std::move(statics)) {
    if (!is_bounded(c)) throw std::invalid_argument("BoundedWriter needs c1 or c2");
    pc_ = c == Construction::c2 ? Pc::deposit : Pc::scan;
    if (c == Construction::c2) {
      Record base = statics_.last.value_or(initial_record(c, n, n));
      base.replicas->values[statics_.phase] = v;
      base.replicas->ghost[statics_.phase] = statics_.writes_done + 1;
      deposit_ = base;
    }
  }

  bool step(Memory& mem) {
    const ProcessId self{n_};
    ++steps_;
    switch (pc_) {
      case Pc::deposit:  // new value into field `phase` of every owned cell
        mem.write(self, cell(n_, j_), CellContent(deposit_), {op_, Line::l0});
        if (++j_ > n_) {
          statics_.last = deposit_;
          pc_ = Pc::scan;
          j_ = 0;
        }
        return false;
      case Pc::scan:
        if (j_ < n_) {
          const CellContent c = mem.read(self, cell(j_, n_), {op_, Line::l1});
          for (const Record& r : c.records()) scanned_.push_back(r.ts);
          ++j_;
        } else {
          temp_ = mem.read(self, cell(n_, n_), {op_, Line::l1})[0];
          scanned_.push_back(temp_.ts);
          select_and_build();
          pc_ = Pc::distribute;
          j_ = 0;
        }
        return false;
      case Pc::distribute:
        mem.write(self, cell(n_, j_), CellContent(out_), {op_, Line::l4});
        if (++j_ > n_) {
          pc_ = Pc::done;
          ++statics_.writes_done;
          statics_.last = out_;
          if (c_ == Construction::c2) statics_.phase = static_cast<std::uint8_t>(1 - statics_.phase);
          return true;
        }
        return false;
      case Pc::done:
        break;
    }
    throw std::logic_error("step on a finished Write");
  }

  bool done() const { return pc_ == Pc::done; }
  OpResult result() const { return {OpKind::write, std::nullopt, steps_, std::nullopt, out_.ghost}; }
  const WriterStatics& statics() const { return statics_; }

 private:
  enum class Pc : std::uint8_t { deposit, scan, distribute, done };

  // pick a free head, build the new record
  void select_and_build() {
    Field free;
    if (mutation_ == Mutation::c1_free_reuse) {
      int v = 0;
      while (!temp_.ts.head.is_bottom() && temp_.ts.head.value() == v) ++v;
      free = Field::of(v);
    } else {
      free = select_free(scanned_, n_);
    }
    out_ = temp_;
    out_.ts = Timestamp{temp_.ts.head, free};
    out_.ghost = statics_.writes_done + 1;
    if (c_ == Construction::c2) {
      out_.replicas->mark = statics_.phase;
    } else {
      out_.value = value_;
    }
  }

  Construction c_;
  int n_;
  Value value_;
  OpId op_;
  Mutation mutation_;
  WriterStatics statics_;
  Pc pc_;
  int j_ = 0;
  int steps_ = 0;
  Record deposit_;
  Record temp_;
  Record out_;
  std::vector<Timestamp> scanned_;
};

class BoundedReader {
 public:
  BoundedReader(Construction c, int n, int i, OpId op, Mutation mutation)
      : c_(c), n_(n), i_(i), op_(op), mutation_(mutation), from_(static_cast<std::size_t>(n + 1)) {
    if (!is_bounded(c)) throw std::invalid_argument("BoundedReader needs c1 or c2");
  }

  bool step(Memory& mem) {
    const ProcessId self{i_};
    ++steps_;
    switch (pc_) {
      case Pc::own01:
        mine() = mem.read(self, cell(i_, i_), {op_, Line::l01})[0];
        pc_ = Pc::writer01;
        return false;
      case Pc::writer01:
        temp_ = mem.read(self, cell(n_, i_), {op_, Line::l01})[0];
        pc_ = Pc::announce02;
        return false;
      case Pc::announce02:
        mem.write(self, cell(i_, n_), announcement(), {op_, Line::l02});
        pc_ = Pc::scan1;
        j_ = 0;
        return false;
      case Pc::scan1:
        from_[static_cast<std::size_t>(j_)] = mem.read(self, cell(j_, i_), {op_, Line::l1})[0];
        if (++j_ > n_) after_scan1();
        return false;
      case Pc::announce22:
        mem.write(self, cell(i_, n_), announcement(), {op_, Line::l22});
        pc_ = Pc::scan23;
        j_ = 0;
        return false;
      case Pc::scan23:
        from_[static_cast<std::size_t>(j_)] = mem.read(self, cell(j_, i_), {op_, Line::l23})[0];
        if (++j_ > n_) after_scan23();
        return false;
      case Pc::distribute41:
        mem.write(self, cell(i_, j_), CellContent(mine()), {op_, Line::l41});
        if (++j_ >= n_) pc_ = Pc::announce41;
        return false;
      case Pc::announce41:
        mem.write(self, cell(i_, n_), announcement(), {op_, Line::l41});
        pc_ = Pc::done;
        return true;
      case Pc::done:
        break;
    }
    throw std::logic_error("step on a finished Read");
  }

  bool done() const { return pc_ == Pc::done; }
  OpResult result() const { return {OpKind::read, result_, steps_, case_, result_ghost_}; }

 private:
  enum class Pc : std::uint8_t {
    own01, writer01, announce02, scan1, announce22, scan23, distribute41, announce41, done
  };

  Record& mine() { return from_[static_cast<std::size_t>(i_)]; }
  const Record& writer_rec() const { return from_[static_cast<std::size_t>(n_)]; }

  // Reader-owned records of the replica variant carry no value.
  Record reader_copy(const Record& r) const {
    if (c_ != Construction::c2) return r;
    Record out;
    out.value.reset();
    out.ts = r.ts;
    out.ghost = r.ghost;
    return out;
  }

  CellContent announcement() { return CellContent(mine(), reader_copy(temp_)); }

  void after_scan1() {
    if (!same_writer_record(c_, writer_rec(), temp_)) {  // writer moved since the own-cell read?
      temp_ = writer_rec();
      j_ = 0;
      pc_ = mutation_ == Mutation::c1_skip_announce ? Pc::scan23 : Pc::announce22;
      return;
    }
    choose();
  }

  void after_scan23() {
    if (!same_writer_record(c_, writer_rec(), temp_)) {  // moved again during the rescan?
      Record bottom;
      if (c_ == Construction::c2) {
        bottom.value.reset();
        bottom.ghost = temp_.replicas->ghost[temp_.replicas->mark];
        result_ = temp_.replicas->marked();
      } else {
        bottom.value = temp_.value;
        bottom.ghost = temp_.ghost;
        result_ = temp_.value;
      }
      result_ghost_ = bottom.ghost;
      mine() = bottom;
      case_ = ReadCase::i;
      start_distribute();
      return;
    }
    choose();
  }

  // pick a dominating reader, else the writer
  void choose() {
    const Record writer = writer_rec();
    std::optional<std::size_t> dominating;
    for (std::size_t j = 0; j < static_cast<std::size_t>(n_); ++j) {
      if (dominates(writer.ts, from_[j].ts)) {
        dominating = j;
        break;
      }
    }
    if (dominating) {
      mine() = from_[*dominating];
      case_ = ReadCase::ii;
      if (c_ == Construction::c2) {
        result_ = writer.replicas->unmarked();
        result_ghost_ = writer.replicas->ghost[1 - writer.replicas->mark];
      }
    } else {
      mine() = reader_copy(writer);
      case_ = ReadCase::iii;
      if (c_ == Construction::c2) {
        result_ = writer.replicas->marked();
        result_ghost_ = writer.replicas->ghost[writer.replicas->mark];
      }
    }
    if (c_ != Construction::c2) {
      result_ = mine().value;
      result_ghost_ = mine().ghost;
    }
    start_distribute();
  }

  void start_distribute() {
    j_ = 0;
    pc_ = Pc::distribute41;
  }

  Construction c_;
  int n_;
  int i_;
  OpId op_;
  Mutation mutation_;
  std::vector<Record> from_;
  Record temp_;
  Pc pc_ = Pc::own01;
  int j_ = 0;
  int steps_ = 0;
  std::optional<Value> result_;
  GhostSeq result_ghost_ = 0;
  std::optional<ReadCase> case_;
};

// ---------------------------------------------------------------------------

using Machine = std::variant<C0Writer, C0Reader, BoundedWriter, BoundedReader>;

inline Machine make_write(Construction c, int n, Value v, OpId op, Mutation m,
                          const WriterStatics& statics) {
  if (c == Construction::c0) return C0Writer(n, v, op, statics);
  return BoundedWriter(c, n, v, op, m, statics);
}

inline Machine make_read(Construction c, int n, int reader, OpId op, Mutation m) {
  if (reader < 0 || reader >= n) throw std::invalid_argument("reader index out of range");
  if (c == Construction::c0) return C0Reader(n, reader, op, m);
  return BoundedReader(c, n, reader, op, m);
}

/// Advances one cell access. Returns true when the operation completed.
inline bool step(Machine& m, Memory& mem) {
  return std::visit([&](auto& machine) { return machine.step(mem); }, m);
}

inline OpResult result(const Machine& m) {
  return std::visit([](const auto& machine) { return machine.result(); }, m);
}

/// Writer statics after a completed Write; nullopt for Read machines.
inline std::optional<WriterStatics> writer_statics(const Machine& m) {
  if (const auto* w = std::get_if<C0Writer>(&m)) return w->statics();
  if (const auto* w = std::get_if<BoundedWriter>(&m)) return w->statics();
  return std::nullopt;
}

}  // namespace wfreg
