#include <gtest/gtest.h>

#include <functional>
#include <set>

#include "wfreg/checkers.hpp"
#include "wfreg/scheduler.hpp"

using namespace wfreg;

namespace {

// Enumerates interleavings by replaying each prefix from scratch, without
// checkpoints, and collects the schedule of every complete run.
void enumerate_by_replay(const Workload& w, std::vector<int>& prefix, std::set<std::vector<int>>& out) {
  Simulation sim(w);
  sim.run_initial_write();
  for (int pid : prefix) sim.step(pid);
  const auto en = sim.enabled();
  if (en.empty()) {
    out.insert(prefix);
    return;
  }
  for (int pid : en) {
    prefix.push_back(pid);
    enumerate_by_replay(w, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

TEST(Simulation, RequiresInitialWrite) {
  Simulation sim(make_workload(Construction::c1, 1, 2, 1));
  EXPECT_THROW(sim.step(0), std::logic_error);
  sim.run_initial_write();
  EXPECT_THROW(sim.run_initial_write(), std::logic_error);
  EXPECT_THROW(sim.step(5), std::invalid_argument);
}

TEST(Simulation, InitialWriteRunsAlone) {
  const Trace t = run_random(make_workload(Construction::c1, 2, 3, 2), 9);
  const auto ops = operations(t);
  ASSERT_FALSE(ops.empty());
  EXPECT_EQ(ops.front().kind, OpKind::write);
  for (std::size_t k = 1; k < ops.size(); ++k) EXPECT_TRUE(precedes(ops.front(), ops[k]));
}

TEST(Simulation, RandomIsDeterministicPerSeed) {
  const Workload w = make_workload(Construction::c2, 2, 4, 2);
  EXPECT_EQ(run_random(w, 17).events, run_random(w, 17).events);
  std::set<std::vector<int>> schedules;
  for (std::uint64_t s = 0; s < 20; ++s) schedules.insert(run_random(w, s).schedule_taken());
  EXPECT_GT(schedules.size(), 15u);
}

TEST(Simulation, ReplayReproducesRandomRun) {
  for (auto c : {Construction::c0, Construction::c1, Construction::c2}) {
    const Workload w = make_workload(c, 3, 4, 2);
    for (std::uint64_t s = 0; s < 20; ++s) {
      const Trace a = run_random(w, s);
      const Trace b = run_schedule(w, a.schedule_taken());
      EXPECT_EQ(a.events, b.events);
      EXPECT_EQ(b.schedule.steps, a.schedule_taken());
    }
  }
}

TEST(Simulation, ReplayRejectsImpossibleStep) {
  const Workload w = make_workload(Construction::c1, 1, 1, 0);
  const std::vector<int> steps{0};
  EXPECT_THROW(run_schedule(w, steps), std::invalid_argument);
}

TEST(Exhaustive, FixedLengthOperationsGiveMultinomialCount) {
  // c0 operations always take 2n+2 accesses: one Write and one Read at n=1
  // interleave in C(8,4) ways.
  const Workload w = make_workload(Construction::c0, 1, 2, 1);
  const auto s = explore_exhaustive(w, [](const Trace&) { return Verdict::ok("none"); });
  EXPECT_EQ(s.schedules, 70u);
  EXPECT_DOUBLE_EQ(std::round(s.estimate), 70.0);
}

TEST(Exhaustive, MatchesReplayEnumeration) {
  for (auto c : {Construction::c1, Construction::c2}) {
    const Workload w = make_workload(c, 1, 2, 1);
    std::set<std::vector<int>> expected;
    std::vector<int> prefix;
    enumerate_by_replay(w, prefix, expected);

    std::set<std::vector<int>> seen;
    std::size_t mismatched = 0;
    const auto s = explore_exhaustive(w, [&](const Trace& t) {
      seen.insert(t.schedule.steps);
      if (t.events != run_schedule(w, t.schedule.steps).events) ++mismatched;
      return Verdict::ok("none");
    });
    EXPECT_EQ(s.schedules, expected.size());
    EXPECT_EQ(seen, expected);
    EXPECT_EQ(mismatched, 0u);
    EXPECT_LE(static_cast<double>(s.schedules), s.estimate);
  }
}

TEST(Exhaustive, RefusesAboveCeiling) {
  const Workload w = make_workload(Construction::c1, 1, 3, 1);
  ExploreOptions o;
  o.ceiling = 10;
  try {
    explore_exhaustive(w, [](const Trace&) { return Verdict::ok("none"); }, o);
    FAIL() << "expected refusal";
  } catch (const CeilingExceeded& e) {
    EXPECT_GT(e.estimate(), 10.0);
  }
}

TEST(Exhaustive, ReportsReplayableCounterexample) {
  const Workload w = make_workload(Construction::c1, 1, 3, 1);
  // Any trace where the Read returns the last value counts as a failure here.
  auto check = [](const Trace& t) {
    for (const auto& op : operations(t)) {
      if (op.kind == OpKind::read && op.value == 3) return Verdict::failure("probe", "read 3");
    }
    return Verdict::ok("probe");
  };
  ExploreOptions o;
  o.stop_on_first_failure = true;
  const auto s = explore_exhaustive(w, check, o);
  ASSERT_TRUE(s.counterexample.has_value());
  EXPECT_EQ(s.failed, 1u);
  EXPECT_FALSE(check(run_schedule(w, *s.counterexample)).passed());
}

TEST(Adversary, SoloProcessCompletes) {
  for (auto c : {Construction::c0, Construction::c1, Construction::c2}) {
    const Workload w = make_workload(c, 2, 5, 3);
    for (int pid = 0; pid <= 2; ++pid) {
      const Trace t = run_adversary(w, Adversary::stall_all_but(pid, 4));
      int completed = 0;
      for (const auto& op : operations(t)) {
        if (op.id == 0) continue;
        EXPECT_EQ(op.pid.index, pid);
        EXPECT_TRUE(op.complete());
        ++completed;
      }
      EXPECT_EQ(completed, pid == 2 ? 4 : 3);
      EXPECT_TRUE(check_wait_free(t).passed());
    }
  }
}

TEST(Adversary, StalledProcessesStopMidOperation) {
  const Workload w = make_workload(Construction::c1, 2, 4, 2);
  const Trace t = run_adversary(w, Adversary::stall_after({0, 2}, 5, 1));
  bool pending = false;
  for (const auto& op : operations(t)) {
    if (op.pid.index == 1) {
      EXPECT_TRUE(op.complete());
    }
    if (!op.complete()) pending = true;
  }
  EXPECT_TRUE(pending);
  EXPECT_EQ(t.schedule.mode, ScheduleSpec::Mode::adversary);
}
