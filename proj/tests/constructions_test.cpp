#include <gtest/gtest.h>

#include "wfreg/scheduler.hpp"

using namespace wfreg;

namespace {

Timestamp ts(int t, int h) {
  return {t < 0 ? Field::bottom() : Field::of(t), h < 0 ? Field::bottom() : Field::of(h)};
}

// Records the writer distributed, one per Write, in trace order.
std::vector<Record> written_records(const Trace& t) {
  std::vector<Record> out;
  for (const Event& e : t.events) {
    if (e.kind == EventKind::cell_write && e.line == Line::l4 && e.pid.index == t.workload.n &&
        e.cell.reader.index == 0) {
      out.push_back(e.payload[0]);
    }
  }
  return out;
}

// Runs each process to completion in turn: writer first, then readers.
Trace sequential(const Workload& w) {
  Simulation sim(w);
  sim.run_initial_write();
  for (int pid = w.n; pid >= 0; --pid) {
    while (sim.has_work(pid)) sim.step(pid);
  }
  return sim.trace({});
}

}  // namespace

TEST(StepBounds, Formulas) {
  EXPECT_EQ(step_bound(Construction::c0, OpKind::write, 2), 6);
  EXPECT_EQ(step_bound(Construction::c0, OpKind::read, 2), 6);
  EXPECT_EQ(step_bound(Construction::c1, OpKind::write, 2), 6);
  EXPECT_EQ(step_bound(Construction::c1, OpKind::read, 2), 13);
  EXPECT_EQ(step_bound(Construction::c2, OpKind::write, 2), 9);
  EXPECT_EQ(step_bound(Construction::c2, OpKind::read, 2), 13);
  for (auto c : {Construction::c0, Construction::c1, Construction::c2}) {
    for (int n : {1, 2, 3, 8}) {
      for (auto k : {OpKind::write, OpKind::read}) {
        EXPECT_EQ(static_access_profile(c, k, n).cell_accesses(), step_bound(c, k, n));
      }
    }
  }
}

TEST(C0, SequentialWriteThenRead) {
  const Trace t = sequential(make_workload(Construction::c0, 2, 3, 1));
  for (const OperationView& op : operations(t)) {
    EXPECT_EQ(op.steps, 6);
    if (op.kind == OpKind::read) {
      EXPECT_EQ(op.value, 3);
    }
  }
  const auto recs = written_records(t);
  ASSERT_EQ(recs.size(), 3u);
  for (std::size_t k = 0; k < recs.size(); ++k) EXPECT_EQ(recs[k].tag, k + 1);
}

TEST(C0, WriterFirstMutationScansWriterFirst) {
  for (auto m : {Mutation::none, Mutation::c0_writer_first}) {
    const Trace t = sequential(make_workload(Construction::c0, 2, 1, 1, m));
    std::vector<int> order;
    for (const Event& e : t.events) {
      if (e.pid.index == 0 && e.kind == EventKind::cell_read) order.push_back(e.cell.owner.index);
    }
    if (m == Mutation::none) {
      EXPECT_EQ(order, (std::vector<int>{0, 1, 2}));
    } else {
      EXPECT_EQ(order, (std::vector<int>{2, 0, 1}));
    }
  }
}

TEST(C1, SoloWritesChainByDomination) {
  const Trace t = sequential(make_workload(Construction::c1, 1, 7, 0));
  const auto recs = written_records(t);
  ASSERT_EQ(recs.size(), 7u);
  EXPECT_EQ(recs[0].ts, ts(-1, 0));
  EXPECT_EQ(recs[1].ts, ts(0, 1));
  EXPECT_EQ(recs[2].ts, ts(1, 2));
  EXPECT_EQ(recs[3].ts, ts(2, 0));  // own record (1,2) is the only occupied one
  for (std::size_t k = 1; k < recs.size(); ++k) {
    EXPECT_TRUE(dominates(recs[k - 1].ts, recs[k].ts)) << k;
    EXPECT_EQ(recs[k].ts.tail, recs[k - 1].ts.head);
    EXPECT_EQ(recs[k].value, static_cast<Value>(k + 1));
    EXPECT_EQ(recs[k].ghost, k + 1);
  }
}

TEST(C1, FreeReuseMutationBreaksDomination) {
  const Trace t = sequential(make_workload(Construction::c1, 1, 3, 0, Mutation::c1_free_reuse));
  const auto recs = written_records(t);
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(recs[2].ts, ts(1, 0));
  EXPECT_FALSE(dominates(recs[1].ts, recs[2].ts));
}

TEST(C1, QuiescentReadTakesCaseThree) {
  for (int n : {1, 2, 3}) {
    const Trace t = sequential(make_workload(Construction::c1, n, 2, 1));
    for (const OperationView& op : operations(t)) {
      if (op.kind == OpKind::write) {
        EXPECT_EQ(op.steps, 2 * n + 2);
        continue;
      }
      EXPECT_EQ(op.read_case, ReadCase::iii);
      EXPECT_EQ(op.value, 2);
      EXPECT_EQ(op.ghost, 2u);
      // 0.1 two reads, 0.2 one write, line-1 scan, 4.1 distribution; no rescan
      EXPECT_EQ(op.steps, 2 * n + 5);
    }
  }
}

TEST(C1, ReaderCannotReadOutOfRange) {
  EXPECT_THROW(make_read(Construction::c1, 2, 2, 0, Mutation::none), std::invalid_argument);
  EXPECT_THROW(make_read(Construction::c1, 2, -1, 0, Mutation::none), std::invalid_argument);
}

TEST(C2, ReaderRecordsCarryNoValue) {
  const Trace t = sequential(make_workload(Construction::c2, 2, 3, 1));
  for (const Event& e : t.events) {
    if (e.kind != EventKind::cell_write) continue;
    for (const Record& r : e.payload.records()) {
      if (e.pid.index == 2) {
        EXPECT_TRUE(r.replicas.has_value());
      } else {
        EXPECT_FALSE(r.value.has_value());
        EXPECT_FALSE(r.replicas.has_value());
      }
    }
  }
  for (const OperationView& op : operations(t)) {
    if (op.kind == OpKind::write) {
      EXPECT_EQ(op.steps, 3 * 2 + 3);
    }
    if (op.kind == OpKind::read) {
      EXPECT_EQ(op.value, 3);
    }
  }
}

TEST(C2, WriteAlternatesValueFields) {
  const Trace t = sequential(make_workload(Construction::c2, 1, 4, 0));
  const auto recs = written_records(t);
  ASSERT_EQ(recs.size(), 4u);
  for (std::size_t k = 0; k < recs.size(); ++k) {
    const ReplicaSlots& s = *recs[k].replicas;
    EXPECT_EQ(s.mark, (k + 1) % 2);
    EXPECT_EQ(s.marked(), static_cast<Value>(k + 1));
    EXPECT_EQ(s.ghost[s.mark], k + 1);
    if (k > 0) {
      EXPECT_EQ(s.unmarked(), static_cast<Value>(k));
    }
  }
}

TEST(Machines, StepAfterDoneThrows) {
  Memory mem(1, 4, Construction::c1);
  Machine m = make_write(Construction::c1, 1, 1, 0, Mutation::none, {});
  while (!step(m, mem)) {
  }
  EXPECT_THROW(step(m, mem), std::logic_error);
}
