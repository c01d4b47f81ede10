#include <gtest/gtest.h>

#include <map>

#include "wfreg/monitors.hpp"
#include "wfreg/scheduler.hpp"

using namespace wfreg;

namespace {

ExploreSummary first_failure(const Workload& w, const TraceCheck& check) {
  ExploreOptions o;
  o.stop_on_first_failure = true;
  return explore_exhaustive(w, check, o);
}

const Verdict& part(const MonitorReport& m, const std::string& name) {
  for (const Verdict& v : m.parts) {
    if (v.check == name) return v;
  }
  throw std::out_of_range("no monitor " + name);
}

// Replaces the first record of event `k`.
void tamper(Trace& t, std::size_t k, const std::function<void(Record&)>& f) {
  const CellContent& old = t.events[k].payload;
  Record first = old[0];
  f(first);
  t.events[k].payload = old.size() == 2 ? CellContent(first, old[1]) : CellContent(first);
}

}  // namespace

TEST(Monitors, PassOnCorrectRuns) {
  for (auto c : {Construction::c0, Construction::c1, Construction::c2}) {
    for (int n : {1, 2, 3}) {
      const Workload w = make_workload(c, n, 5, 2);
      for (std::uint64_t s = 0; s < 150; ++s) {
        const MonitorReport m = run_monitors(run_random(w, s));
        for (const Verdict& v : m.parts) {
          EXPECT_TRUE(v.passed()) << to_string(c) << " n=" << n << " seed " << s << " " << v.check << ": " << v.detail;
        }
      }
    }
  }
}

TEST(Monitors, ReportEachMonitorByName) {
  const MonitorReport m = run_monitors(run_random(make_workload(Construction::c1, 2, 3, 1), 0));
  for (const char* name : {"substrate", "tag-window", "field-range", "free-selection", "fresh-timestamp", "read-case",
                           "dominators-equal"}) {
    EXPECT_NO_THROW(part(m, name)) << name;
  }
}

TEST(Monitors, RandomRunsReachRescanAndWriterCases) {
  for (auto c : {Construction::c1, Construction::c2}) {
    std::map<ReadCase, int> seen;
    const Workload w = make_workload(c, 2, 8, 4);
    for (std::uint64_t s = 0; s < 300; ++s) {
      for (const OperationView& op : operations(run_random(w, s))) {
        if (op.read_case) ++seen[*op.read_case];
      }
    }
    EXPECT_GT(seen[ReadCase::i], 0) << to_string(c);
    EXPECT_GT(seen[ReadCase::iii], 0) << to_string(c);
  }
}

// Uniform random schedules almost never adopt a reader's timestamp, so this
// one is built by hand: the writer reaches R[2][0] only, reader 0 adopts the
// new Write from there, and reader 1 then sees it dominate the writer's R[2][1].
TEST(Monitors, ReaderTimestampAdoptedWhenItDominatesTheWriters) {
  for (auto c : {Construction::c1, Construction::c2}) {
    const Workload w = make_workload(c, 2, 2, 1);
    const int writer_steps = c == Construction::c2 ? 3 + 3 + 1 : 3 + 1;
    std::vector<int> schedule(static_cast<std::size_t>(writer_steps), 2);
    schedule.insert(schedule.end(), 9, 0);
    schedule.insert(schedule.end(), 9, 1);
    const Trace t = run_schedule(w, schedule);
    std::map<int, OperationView> reads;
    for (const OperationView& op : operations(t)) {
      if (op.kind == OpKind::read) reads[op.pid.index] = op;
    }
    ASSERT_EQ(reads.size(), 2u);
    EXPECT_EQ(reads[0].read_case, ReadCase::iii) << to_string(c);
    EXPECT_EQ(reads[1].read_case, ReadCase::ii) << to_string(c);
    EXPECT_EQ(reads[1].value, 2);
    EXPECT_TRUE(reads[1].complete());
    EXPECT_TRUE(standard_checks(t).passed()) << standard_checks(t).detail;
  }
}

TEST(Monitors, FreeSelectionCatchesHeadReuse) {
  const auto s = first_failure(make_workload(Construction::c1, 1, 3, 1, Mutation::c1_free_reuse),
                               [](const Trace& t) { return monitor_suite(t); });
  ASSERT_EQ(s.failed, 1u);
  EXPECT_NE(s.counterexample_detail.find("free-selection"), std::string::npos) << s.counterexample_detail;
}

TEST(Monitors, NewTimestampCheckCatchesSkippedAnnounce) {
  const auto s = first_failure(make_workload(Construction::c1, 1, 5, 1, Mutation::c1_skip_announce),
                               [](const Trace& t) { return monitor_suite(t); });
  ASSERT_EQ(s.failed, 1u);
  EXPECT_NE(s.counterexample_detail.find("fresh-timestamp"), std::string::npos) << s.counterexample_detail;
}

TEST(Monitors, TagWindowCatchesWriterFirstScan) {
  // Reader 0 scans the writer first (tag 1), then W2, W3 and a whole Read by
  // reader 1 complete, so reader 0 copies tag 3 from reader 1 afterwards.
  const Workload w = make_workload(Construction::c0, 2, 3, 1, Mutation::c0_writer_first);
  std::vector<int> schedule{0};
  schedule.insert(schedule.end(), 12, 2);
  schedule.insert(schedule.end(), 6, 1);
  schedule.insert(schedule.end(), 5, 0);
  const Trace t = run_schedule(w, schedule, false);
  const Verdict v = part(run_monitors(t), "tag-window");
  EXPECT_EQ(v.status, Status::fail);
  EXPECT_NE(v.detail.find("tag 3 against writer tag 1"), std::string::npos) << v.detail;
  // The same schedule without the mutation is clean.
  const Workload ok = make_workload(Construction::c0, 2, 3, 1);
  EXPECT_TRUE(part(run_monitors(run_schedule(ok, schedule, false)), "tag-window").passed());
}

TEST(Monitors, SubstrateCatchesForgedRead) {
  Trace t = run_random(make_workload(Construction::c1, 2, 3, 1), 4);
  ASSERT_TRUE(monitor_substrate(t).passed());
  std::size_t k = 0;
  while (t.events[k].kind != EventKind::cell_read || t.events[k].op == 0) ++k;
  tamper(t, k, [](Record& r) { r.value = 99; });
  EXPECT_EQ(monitor_substrate(t).status, Status::fail);
}

TEST(Monitors, FieldRangeCatchesOutOfDomainField) {
  Trace t = run_random(make_workload(Construction::c1, 1, 3, 1), 2);
  ASSERT_TRUE(monitor_field_range(t).passed());
  std::size_t k = 0;
  while (t.events[k].kind != EventKind::cell_write) ++k;
  tamper(t, k, [](Record& r) { r.ts.head = Field::of(7); });  // 4n+2 = 6
  EXPECT_EQ(monitor_field_range(t).status, Status::fail);
}

TEST(Monitors, ReadCaseMonitorCatchesMislabelledCase) {
  Trace t = run_random(make_workload(Construction::c1, 2, 3, 2), 8);
  ASSERT_TRUE(part(run_monitors(t), "read-case").passed());
  for (Event& e : t.events) {
    if (e.kind == EventKind::respond && e.read_case) {
      e.read_case = *e.read_case == ReadCase::iii ? ReadCase::ii : ReadCase::iii;
      break;
    }
  }
  EXPECT_EQ(part(run_monitors(t), "read-case").status, Status::fail);
}

TEST(Monitors, StandardChecksCombineEverything) {
  const Trace t = run_random(make_workload(Construction::c2, 2, 3, 2), 3);
  EXPECT_TRUE(standard_checks(t).passed());
}
