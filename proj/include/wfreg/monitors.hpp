// Invariant monitors recomputed from a trace alone.
//
// Each monitor re-derives what a protocol step must have observed from the
// logged cell accesses: it never trusts the machine's own bookkeeping beyond
// the reported case label, which it cross-checks.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wfreg/checkers.hpp"
#include "wfreg/constructions.hpp"
#include "wfreg/timestamp.hpp"
#include "wfreg/trace.hpp"
#include "wfreg/verdict.hpp"

namespace wfreg {

namespace detail {

struct OpAccesses {
  OperationView view;
  std::vector<const Event*> events;
};

inline std::map<OpId, OpAccesses> group_accesses(const Trace& t) {
  std::map<OpId, OpAccesses> out;
  for (const OperationView& op : operations(t)) out[op.id].view = op;
  for (const Event& e : t.events) {
    if (e.kind == EventKind::cell_read || e.kind == EventKind::cell_write) out[e.op].events.push_back(&e);
  }
  return out;
}

inline std::vector<const Event*> select(const std::vector<const Event*>& events, EventKind kind, Line line) {
  std::vector<const Event*> out;
  for (const Event* e : events) {
    if (e->kind == kind && e->line == line) out.push_back(e);
  }
  return out;
}

inline std::string where(const OperationView& op) { return describe(op); }

/// What the bounded Read decided after its scan, recomputed from its accesses.
struct ReadAnalysis {
  const OpAccesses* op = nullptr;
  ReadCase expected = ReadCase::iii;
  const Event* decisive_writer = nullptr;     // writer record the dominance test used
  std::vector<const Event*> dominators;      // reader records dominating it
  const Event* middle = nullptr;             // case i: writer read in the full scan
  const Event* source = nullptr;             // read that supplied the adopted timestamp
  const Event* first_distribute = nullptr;   // first distribute write
  std::optional<Record> adopted;             // first record of the final R[i][n] write
  std::string malformed;
};

inline ReadAnalysis analyze_read(const OpAccesses& acc, const Trace& t) {
  ReadAnalysis a;
  a.op = &acc;
  const int n = t.workload.n;
  const Construction c = t.workload.construction;
  const auto r01 = select(acc.events, EventKind::cell_read, Line::l01);
  const auto s1 = select(acc.events, EventKind::cell_read, Line::l1);
  const auto s23 = select(acc.events, EventKind::cell_read, Line::l23);
  const auto w41 = select(acc.events, EventKind::cell_write, Line::l41);
  if (r01.size() != 2 || s1.size() != static_cast<std::size_t>(n + 1) ||
      (!s23.empty() && s23.size() != static_cast<std::size_t>(n + 1)) || w41.size() != static_cast<std::size_t>(n + 1)) {
    a.malformed = "unexpected access shape";
    return a;
  }
  auto writer_of = [&](const std::vector<const Event*>& scan) -> const Event* {
    for (const Event* e : scan) {
      if (e->cell.owner.index == n) return e;
    }
    return nullptr;
  };
  const Record& t0 = r01[1]->payload[0];
  const Event* w1 = writer_of(s1);
  a.first_distribute = w41.front();
  a.adopted = w41.back()->payload[0];
  const std::vector<const Event*>* decisive = &s1;
  if (!same_writer_record(c, w1->payload[0], t0)) {
    if (s23.empty()) {
      a.malformed = "writer changed but no rescan";
      return a;
    }
    const Event* w23 = writer_of(s23);
    if (!same_writer_record(c, w23->payload[0], w1->payload[0])) {
      a.expected = ReadCase::i;
      a.middle = w1;
      return a;
    }
    decisive = &s23;
  } else if (!s23.empty()) {
    a.malformed = "rescan without a writer change";
    return a;
  }
  a.decisive_writer = writer_of(*decisive);
  for (const Event* e : *decisive) {
    if (e->cell.owner.index < n && dominates(a.decisive_writer->payload[0].ts, e->payload[0].ts)) {
      a.dominators.push_back(e);
    }
  }
  if (!a.dominators.empty()) {
    a.expected = ReadCase::ii;
    a.source = a.dominators.front();
  } else {
    a.expected = ReadCase::iii;
    a.source = a.decisive_writer;
  }
  return a;
}

}  // namespace detail

/// Every cell-read returns the latest preceding cell-write (or the initial
/// record), every access respects the cell's owner/reader roles, and
/// sequence numbers are dense.
inline Verdict monitor_substrate(const Trace& t) {
  Memory mem(t.workload.n, t.workload.domain(), t.workload.construction);
  for (std::size_t k = 0; k < t.events.size(); ++k) {
    const Event& e = t.events[k];
    if (e.seq != k) return Verdict::failure("substrate", "sequence numbers not dense at " + std::to_string(k));
    if (e.kind == EventKind::cell_read) {
      if (e.pid != e.cell.reader) return Verdict::failure("substrate", "read by non-reader at seq " + std::to_string(k));
      if (!(mem.peek(e.cell) == e.payload)) {
        return Verdict::failure("substrate", "stale or fabricated cell-read at seq " + std::to_string(k));
      }
    } else if (e.kind == EventKind::cell_write) {
      if (e.pid != e.cell.owner) return Verdict::failure("substrate", "write by non-owner at seq " + std::to_string(k));
      mem.write(e.pid, e.cell, e.payload);
    }
  }
  return Verdict::ok("substrate");
}

/// c0: the selected tag lies between the writer's scanned tag and one more.
inline Verdict monitor_tag_window(const Trace& t) {
  if (t.workload.construction != Construction::c0) return Verdict::ok("tag-window", "not applicable");
  const int n = t.workload.n;
  for (const auto& [id, acc] : detail::group_accesses(t)) {
    if (acc.view.kind != OpKind::read || !acc.view.complete()) continue;
    const auto scan = detail::select(acc.events, EventKind::cell_read, Line::l1);
    const auto out = detail::select(acc.events, EventKind::cell_write, Line::l4);
    if (out.empty()) return Verdict::failure("tag-window", detail::where(acc.view) + " distributed nothing");
    std::optional<std::uint64_t> writer_tag;
    for (const Event* e : scan) {
      if (e->cell.owner.index == n) writer_tag = e->payload[0].tag;
    }
    const std::uint64_t selected = out.front()->payload[0].tag;
    if (!writer_tag || selected < *writer_tag || selected > *writer_tag + 1) {
      return Verdict::failure("tag-window", detail::where(acc.view) + " selected tag " + std::to_string(selected) +
                                            " against writer tag " +
                                            (writer_tag ? std::to_string(*writer_tag) : std::string("?")));
    }
  }
  return Verdict::ok("tag-window");
}

/// Every tail/head field anywhere in the trace lies in {bottom} and 0..4n+2.
inline Verdict monitor_field_range(const Trace& t) {
  if (!is_bounded(t.workload.construction)) return Verdict::ok("field-range", "not applicable");
  for (const Event& e : t.events) {
    if (e.kind != EventKind::cell_read && e.kind != EventKind::cell_write) continue;
    for (const Record& r : e.payload.records()) {
      if (!in_domain(r.ts, t.workload.n)) {
        return Verdict::failure("field-range", "timestamp " + to_string(r.ts) + " out of range at seq " +
                                                   std::to_string(e.seq));
      }
    }
  }
  return Verdict::ok("field-range");
}

/// Bounded Writes: the new head is free among the scanned records, and per the
/// timestamp-recycling invariant the new timestamp is neither equal to nor
/// dominated by any timestamp that (a) was scanned, (b) sits in a
/// shared record other than a reader's announcement slot, or (c) is held
/// locally by a concurrent Read that later distributes it.
inline std::vector<Verdict> monitor_write_timestamps(const Trace& t) {
  std::vector<Verdict> out{Verdict::ok("free-selection"), Verdict::ok("fresh-timestamp")};
  if (!is_bounded(t.workload.construction)) {
    for (auto& v : out) v.detail = "not applicable";
    return out;
  }
  const int n = t.workload.n;
  const auto grouped = detail::group_accesses(t);

  struct Held {
    Seq from;
    Seq until;
    Timestamp ts;
    std::string who;
  };
  std::vector<Held> held;
  for (const auto& [id, acc] : grouped) {
    if (acc.view.kind != OpKind::read || !acc.view.complete()) continue;
    const auto a = detail::analyze_read(acc, t);
    if (!a.malformed.empty() || !a.source || !a.adopted || a.adopted->ts.is_bottom()) continue;
    held.push_back({a.source->seq, a.first_distribute->seq, a.adopted->ts, detail::where(acc.view)});
  }

  std::map<Seq, const detail::OpAccesses*> line3_at;  // first distribute write of each Write
  for (const auto& [id, acc] : grouped) {
    if (acc.view.kind != OpKind::write) continue;
    const auto w4 = detail::select(acc.events, EventKind::cell_write, Line::l4);
    if (!w4.empty()) line3_at[w4.front()->seq] = &acc;
  }

  auto offends = [](Timestamp fresh, Timestamp old) { return fresh == old || dominates(fresh, old); };

  Memory mem(n, t.workload.domain(), t.workload.construction);
  for (const Event& e : t.events) {
    if (auto it = line3_at.find(e.seq); it != line3_at.end()) {
      const detail::OpAccesses& acc = *it->second;
      const Timestamp fresh = e.payload[0].ts;
      const std::string who = detail::where(acc.view) + " chose " + to_string(fresh);
      const auto scan = detail::select(acc.events, EventKind::cell_read, Line::l1);
      for (const Event* s : scan) {
        for (const Record& r : s->payload.records()) {
          for (Field f : {r.ts.tail, r.ts.head}) {
            if (out[0].passed() && f == fresh.head) {
              out[0] = Verdict::failure("free-selection", who + ": head occupied in scanned " + to_string(r.ts));
            }
          }
          if (out[1].passed() && offends(fresh, r.ts)) {
            out[1] = Verdict::failure("fresh-timestamp", who + ": equal to or dominated by scanned " + to_string(r.ts));
          }
        }
      }
      for (int i = 0; i <= n && out[1].passed(); ++i) {
        for (int j = 0; j <= n; ++j) {
          const CellContent& content = mem.peek(cell(i, j));
          const Record& r = content[0];
          if (offends(fresh, r.ts)) {
            out[1] = Verdict::failure("fresh-timestamp", who + ": equal to or dominated by " + to_string(r.ts) + " in R[" +
                                                    std::to_string(i) + "][" + std::to_string(j) + "]");
            break;
          }
        }
      }
      for (const Held& h : held) {
        if (out[1].passed() && h.from < e.seq && e.seq < h.until && offends(fresh, h.ts)) {
          out[1] = Verdict::failure("fresh-timestamp", who + ": equal to or dominated by " + to_string(h.ts) +
                                                  " held by " + h.who + " for distribution");
        }
      }
    }
    if (e.kind == EventKind::cell_write) mem.write(e.pid, e.cell, e.payload);
  }
  return out;
}

/// Bounded Reads: the reported case matches the one recomputed from the
/// scans; case ii adopts the next Write's timestamp, case iii the scanned
/// writer's; case i returns the middle-scan Write, which responds within
/// the Read's interval; all dominating reader timestamps are identical;
/// the returned value is the value of the Write it is attributed to.
inline std::vector<Verdict> monitor_reads(const Trace& t) {
  std::vector<Verdict> out{Verdict::ok("read-case"), Verdict::ok("dominators-equal")};
  if (!is_bounded(t.workload.construction)) {
    for (auto& v : out) v.detail = "not applicable";
    return out;
  }
  const auto grouped = detail::group_accesses(t);
  std::map<GhostSeq, OperationView> writes;
  for (const auto& [id, acc] : grouped) {
    if (acc.view.kind == OpKind::write) writes[acc.view.ghost] = acc.view;
  }
  auto fail = [&](std::size_t k, const std::string& check, const std::string& msg) {
    if (out[k].passed()) out[k] = Verdict::failure(check, msg);
  };
  for (const auto& [id, acc] : grouped) {
    const OperationView& r = acc.view;
    if (r.kind != OpKind::read || !r.complete()) continue;
    const auto a = detail::analyze_read(acc, t);
    const std::string who = detail::where(r);
    if (!a.malformed.empty()) {
      fail(0, "read-case", who + ": " + a.malformed);
      continue;
    }
    if (r.read_case != a.expected) {
      fail(0, "read-case", who + " reported case " + (r.read_case ? std::string(to_string(*r.read_case)) : "none") +
                            ", scans imply case " + std::string(to_string(a.expected)));
      continue;
    }
    GhostSeq expected_ghost = 0;
    switch (a.expected) {
      case ReadCase::i: {
        expected_ghost = a.middle->payload[0].ghost;
        auto it = writes.find(expected_ghost);
        if (it == writes.end() || !it->second.respond || *it->second.respond < r.invoke ||
            *it->second.respond > *r.respond) {
          fail(0, "read-case", who + " (case i): middle-scan Write does not respond within the Read");
        }
        if (!a.adopted->ts.is_bottom()) fail(0, "read-case", who + " (case i) distributed a non-bottom timestamp");
        break;
      }
      case ReadCase::ii: {
        const GhostSeq scanned = a.decisive_writer->payload[0].ghost;
        expected_ghost = scanned + 1;
        if (a.adopted->ghost != expected_ghost) {
          fail(0, "read-case", who + " (case ii) adopted a timestamp of Write " + std::to_string(a.adopted->ghost) +
                                ", expected the next Write " + std::to_string(expected_ghost));
        }
        for (const Event* d : a.dominators) {
          if (d->payload[0].ts != a.dominators.front()->payload[0].ts) {
            fail(1, "dominators-equal", who + ": dominating timestamps " + to_string(d->payload[0].ts) + " and " +
                                            to_string(a.dominators.front()->payload[0].ts) + " differ");
          }
        }
        if (a.adopted->ts != a.dominators.front()->payload[0].ts) {
          fail(0, "read-case", who + " (case ii) distributed a timestamp other than the dominating one");
        }
        break;
      }
      case ReadCase::iii:
        expected_ghost = a.decisive_writer->payload[0].ghost;
        if (a.adopted->ts != a.decisive_writer->payload[0].ts) {
          fail(0, "read-case", who + " (case iii) distributed a timestamp other than the writer's");
        }
        break;
    }
    if (r.ghost != expected_ghost) {
      fail(0, "read-case", who + " attributed to Write " + std::to_string(r.ghost) + ", scans imply Write " +
                            std::to_string(expected_ghost));
    }
    auto w = writes.find(r.ghost);
    if (w == writes.end() || w->second.value != r.value) {
      fail(0, "read-case", who + " returned a value different from that of Write " + std::to_string(r.ghost));
    }
  }
  return out;
}

/// All monitors, each reported separately in `parts`.
struct MonitorReport {
  std::vector<Verdict> parts;

  Verdict overall() const { return combine("monitors", parts); }
};

inline MonitorReport run_monitors(const Trace& t) {
  MonitorReport m;
  m.parts.push_back(monitor_substrate(t));
  m.parts.push_back(monitor_tag_window(t));
  m.parts.push_back(monitor_field_range(t));
  for (auto& v : monitor_write_timestamps(t)) m.parts.push_back(std::move(v));
  for (auto& v : monitor_reads(t)) m.parts.push_back(std::move(v));
  return m;
}

inline Verdict monitor_suite(const Trace& t) { return run_monitors(t).overall(); }

/// Atomicity, every monitor, and wait-freedom: the default per-trace check.
inline Verdict standard_checks(const Trace& t, const CheckOptions& opts = {}) {
  std::vector<Verdict> parts{check_atomic(t, opts)};
  for (auto& v : run_monitors(t).parts) parts.push_back(std::move(v));
  parts.push_back(check_wait_free(t));
  return combine("standard", parts);
}

}  // namespace wfreg
