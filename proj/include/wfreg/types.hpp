// Core value types shared by every layer of the register lab.
#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wfreg {

using Value = std::int32_t;
using OpId = std::uint32_t;
using Seq = std::uint64_t;
using GhostSeq = std::uint64_t;

/// Index of a process. Readers are 0..n-1, the writer is n.
struct ProcessId {
  int index = 0;

  friend constexpr auto operator<=>(ProcessId, ProcessId) = default;
};

enum class Construction : std::uint8_t { c0, c1, c2 };

constexpr std::string_view to_string(Construction c) {
  switch (c) {
    case Construction::c0: return "c0";
    case Construction::c1: return "c1";
    case Construction::c2: return "c2";
  }
  return "?";
}

inline std::optional<Construction> parse_construction(std::string_view s) {
  if (s == "c0") return Construction::c0;
  if (s == "c1") return Construction::c1;
  if (s == "c2") return Construction::c2;
  return std::nullopt;
}

constexpr bool is_bounded(Construction c) { return c != Construction::c0; }

/// Seeded protocol faults used to show that the checkers discriminate.
enum class Mutation : std::uint8_t {
  none,
  c0_writer_first,   // c0 Read scans the writer's cell first instead of last
  c1_free_reuse,     // bounded Write picks a head avoiding only its previous head
  c1_skip_announce,  // bounded Read omits its rescan announce to R[i][n]
};

constexpr std::string_view to_string(Mutation m) {
  switch (m) {
    case Mutation::none: return "none";
    case Mutation::c0_writer_first: return "c0-writer-first";
    case Mutation::c1_free_reuse: return "c1-free-reuse";
    case Mutation::c1_skip_announce: return "c1-skip-announce";
  }
  return "?";
}

inline std::optional<Mutation> parse_mutation(std::string_view s) {
  for (auto m : {Mutation::none, Mutation::c0_writer_first, Mutation::c1_free_reuse,
                 Mutation::c1_skip_announce}) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

/// One tail or head field of a bounded timestamp: bottom, or a number.
/// Bottom compares below every number.
class Field {
 public:
  constexpr Field() = default;

  static constexpr Field bottom() { return Field{}; }
  static constexpr Field of(int v) {
    if (v < 0) throw std::invalid_argument("timestamp field must be nonnegative");
    Field f;
    f.raw_ = static_cast<std::int16_t>(v);
    return f;
  }

  constexpr bool is_bottom() const { return raw_ < 0; }
  constexpr int value() const {
    if (is_bottom()) throw std::logic_error("value() of bottom field");
    return raw_;
  }

  friend constexpr auto operator<=>(Field, Field) = default;

 private:
  std::int16_t raw_ = -1;
};

inline std::string to_string(Field f) {
  return f.is_bottom() ? std::string("_") : std::to_string(f.value());
}

/// A (tail, head) pair. (bottom, bottom) is the initial timestamp.
struct Timestamp {
  Field tail;
  Field head;

  constexpr bool is_bottom() const { return tail.is_bottom() && head.is_bottom(); }
  friend constexpr bool operator==(Timestamp, Timestamp) = default;
};

inline std::string to_string(Timestamp ts) {
  return "(" + to_string(ts.tail) + "," + to_string(ts.head) + ")";
}

/// The two alternating value fields of a writer-owned record in the
/// replica-optimized construction. `mark` names the field last completed.
struct ReplicaSlots {
  std::array<Value, 2> values{};
  std::uint8_t mark = 0;
  std::array<GhostSeq, 2> ghost{};  // verification only

  Value marked() const { return values[mark]; }
  Value unmarked() const { return values[1 - mark]; }

  friend bool operator==(const ReplicaSlots&, const ReplicaSlots&) = default;
};

/// The unit of atomic communication held in a shared cell.
///
/// `value` is absent for reader-owned records of the replica-optimized
/// construction. `tag` is used by c0 only, `ts` by c1/c2 only.
/// `ghost` names the Write whose value (or timestamp) the record carries;
/// it is 0 for the initial record. Protocol code never branches on it.
struct Record {
  std::optional<Value> value = Value{0};
  std::uint64_t tag = 0;
  Timestamp ts;
  std::optional<ReplicaSlots> replicas;
  GhostSeq ghost = 0;

  friend bool operator==(const Record&, const Record&) = default;
};

/// Equality on everything a protocol may observe; ghost fields are ignored.
inline bool same_payload(const Record& a, const Record& b) {
  if (a.value != b.value || a.tag != b.tag || a.ts != b.ts) return false;
  if (a.replicas.has_value() != b.replicas.has_value()) return false;
  if (a.replicas) {
    return a.replicas->values == b.replicas->values && a.replicas->mark == b.replicas->mark;
  }
  return true;
}

/// Identity of a shared cell R[owner][reader].
struct CellId {
  ProcessId owner;
  ProcessId reader;

  friend constexpr auto operator<=>(CellId, CellId) = default;
};

constexpr CellId cell(int owner, int reader) { return CellId{{owner}, {reader}}; }

/// Content of one cell: one record, or two for the merged cells R[i][n] (i < n).
class CellContent {
 public:
  CellContent() = default;
  explicit CellContent(const Record& only) : records_{only, Record{}}, arity_(1) {}
  CellContent(const Record& first, const Record& second)
      : records_{first, second}, arity_(2) {}

  std::size_t size() const { return arity_; }
  const Record& operator[](std::size_t k) const {
    if (k >= arity_) throw std::out_of_range("cell record index");
    return records_[k];
  }
  std::span<const Record> records() const { return {records_.data(), arity_}; }

  friend bool operator==(const CellContent& a, const CellContent& b) {
    if (a.arity_ != b.arity_) return false;
    for (std::size_t k = 0; k < a.arity_; ++k) {
      if (!(a.records_[k] == b.records_[k])) return false;
    }
    return true;
  }

 private:
  std::array<Record, 2> records_{};
  std::uint8_t arity_ = 0;
};

/// Program line labels of the step machines, used in trace events.
enum class Line : std::uint8_t { none, l0, l01, l02, l1, l22, l23, l4, l41 };

constexpr std::string_view to_string(Line l) {
  switch (l) {
    case Line::none: return "";
    case Line::l0: return "0";
    case Line::l01: return "0.1";
    case Line::l02: return "0.2";
    case Line::l1: return "1";
    case Line::l22: return "2.2";
    case Line::l23: return "2.3";
    case Line::l4: return "4";
    case Line::l41: return "4.1";
  }
  return "";
}

inline std::optional<Line> parse_line(std::string_view s) {
  for (auto l : {Line::none, Line::l0, Line::l01, Line::l02, Line::l1, Line::l22, Line::l23,
                 Line::l4, Line::l41}) {
    if (s == to_string(l)) return l;
  }
  return std::nullopt;
}

enum class OpKind : std::uint8_t { write, read };

/// Which branch of the bounded Read produced its timestamp.
enum class ReadCase : std::uint8_t {
  i,    // bottom timestamp after observing three distinct writer records
  ii,   // adopted a reader timestamp dominating the writer's
  iii,  // adopted the writer's scanned timestamp
};

constexpr std::string_view to_string(ReadCase c) {
  switch (c) {
    case ReadCase::i: return "i";
    case ReadCase::ii: return "ii";
    case ReadCase::iii: return "iii";
  }
  return "?";
}

inline std::optional<ReadCase> parse_read_case(std::string_view s) {
  if (s == "i") return ReadCase::i;
  if (s == "ii") return ReadCase::ii;
  if (s == "iii") return ReadCase::iii;
  return std::nullopt;
}

}  // namespace wfreg
