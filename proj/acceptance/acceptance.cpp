// Acceptance criteria, one pass/fail line each.
//
//   wfreg_acceptance            run everything
//   wfreg_acceptance --only 6b  run one criterion
//
// Exit status is nonzero when any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wfreg/wfreg.hpp"

using namespace wfreg;

namespace {

// Pinned thresholds.
constexpr double kC0ExhaustiveSeconds = 60.0;
constexpr double kC1ExhaustiveSeconds = 600.0;
constexpr std::uint64_t kSweepSeeds = 10'000;
constexpr int kSweepReaders = 3;
constexpr int kSweepWrites = 4;  // after the initializing Write
constexpr int kSweepReads = 3;
constexpr int kSweepMaxField = 4 * kSweepReaders + 2;
constexpr int kAdversaryRuns = 1000;
constexpr int kAdversaryReaders = 2;
constexpr std::uint64_t kStructureSamples = 300;
const std::vector<int> kStructureNs{1, 2, 3, 8};
const std::vector<int> kCensusNs{1, 2, 3, 4, 5, 6, 7, 8};

struct Outcome {
  bool pass = false;
  std::string summary;
  std::vector<std::string> notes;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double x, const char* spec = "%.2f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

bool all_complete(const Trace& t) {
  for (const OperationView& op : operations(t)) {
    if (!op.complete()) return false;
  }
  return true;
}

ExploreSummary explore(const Workload& w, const TraceCheck& check, bool stop_on_first = false) {
  ExploreOptions o;
  o.stop_on_first_failure = stop_on_first;
  return explore_exhaustive(w, check, o);
}

// -- 1, 2 -----------------------------------------------------------------

Outcome exhaustive_c0() {
  const Workload w = make_workload(Construction::c0, 1, 2, 1);
  Stopwatch clock;
  const auto s = explore(w, [](const Trace& t) {
    if (!all_complete(t)) return Verdict::failure("complete", "pending operation");
    return combine("c0", {check_atomic(t), monitor_tag_window(t), monitor_substrate(t), check_wait_free(t)});
  });
  const double secs = clock.seconds();
  Outcome o;
  o.pass = s.schedules > 0 && s.failed == 0 && secs < kC0ExhaustiveSeconds;
  o.summary = "exhaustive c0, n=1, init + 1 Write + 1 Read: " + std::to_string(s.schedules) + " schedules, " +
              std::to_string(s.failed) + " failures, " + fmt(secs) + " s (limit " + fmt(kC0ExhaustiveSeconds, "%.0f") +
              " s)";
  if (s.counterexample) o.notes.push_back(s.counterexample_detail);
  return o;
}

Outcome exhaustive_c1() {
  const Workload w = make_workload(Construction::c1, 1, 3, 1);
  Stopwatch clock;
  const auto s = explore(w, [](const Trace& t) {
    if (!all_complete(t)) return Verdict::failure("complete", "pending operation");
    return combine("c1", {check_atomic(t), monitor_suite(t), check_wait_free(t)});
  });
  const double secs = clock.seconds();
  Outcome o;
  o.pass = s.schedules > 0 && s.failed == 0 && secs < kC1ExhaustiveSeconds;
  o.summary = "exhaustive c1, n=1, init + 2 Writes + 1 Read: " + std::to_string(s.schedules) + " schedules (estimate " +
              fmt(s.estimate, "%.0f") + ", ceiling " + std::to_string(ExploreOptions{}.ceiling) + "), " +
              std::to_string(s.failed) + " failures, " + fmt(secs) + " s (limit " + fmt(kC1ExhaustiveSeconds, "%.0f") +
              " s)";
  if (s.counterexample) o.notes.push_back(s.counterexample_detail);
  return o;
}

// -- 3 ---------------------------------------------------------------------

Outcome random_sweep() {
  Outcome o;
  o.pass = true;
  std::string parts;
  for (auto c : {Construction::c1, Construction::c2}) {
    const Workload w = make_workload(c, kSweepReaders, kSweepWrites + 1, kSweepReads);
    std::uint64_t failed = 0;
    std::uint64_t out_of_range = 0;
    int max_field_seen = -1;
    std::map<ReadCase, std::uint64_t> cases;
    for (std::uint64_t seed = 0; seed < kSweepSeeds; ++seed) {
      const Trace t = run_random(w, seed);
      const Verdict v = combine("sweep", {check_atomic(t), monitor_suite(t)});
      if (!v.passed()) {
        if (failed++ == 0) o.notes.push_back(std::string(to_string(c)) + " seed " + std::to_string(seed) + ": " + v.detail);
      }
      for (const Event& e : t.events) {
        if (e.kind != EventKind::cell_read && e.kind != EventKind::cell_write) continue;
        for (const Record& r : e.payload.records()) {
          for (Field f : {r.ts.tail, r.ts.head}) {
            if (f.is_bottom()) continue;
            max_field_seen = std::max(max_field_seen, f.value());
            if (f.value() > kSweepMaxField) ++out_of_range;
          }
        }
      }
      for (const OperationView& op : operations(t)) {
        if (op.read_case) ++cases[*op.read_case];
      }
    }
    o.pass = o.pass && failed == 0 && out_of_range == 0;
    parts += std::string(parts.empty() ? "" : "; ") + std::string(to_string(c)) + " " + std::to_string(failed) +
             " failures, max field " + std::to_string(max_field_seen) + ", " + std::to_string(out_of_range) +
             " fields out of range";
    o.notes.push_back(std::string(to_string(c)) + " read cases i/ii/iii: " + std::to_string(cases[ReadCase::i]) + "/" +
                      std::to_string(cases[ReadCase::ii]) + "/" + std::to_string(cases[ReadCase::iii]));
  }
  o.summary = "random sweep, n=3, init + 4 Writes + 3 Reads per reader, " + std::to_string(kSweepSeeds) +
              " seeds each, fields in [0, " + std::to_string(kSweepMaxField) + "]: " + parts;
  return o;
}

// -- 4 ---------------------------------------------------------------------

// Per-operation access counts measured from a trace's events.
struct Measured {
  int cell_reads = 0, cell_writes = 0, record_reads = 0, record_writes = 0;
};

std::map<OpId, Measured> measure(const Trace& t) {
  std::map<OpId, Measured> out;
  for (const Event& e : t.events) {
    const int records = static_cast<int>(e.payload.size());
    if (e.kind == EventKind::cell_read) {
      ++out[e.op].cell_reads;
      out[e.op].record_reads += records;
    } else if (e.kind == EventKind::cell_write) {
      ++out[e.op].cell_writes;
      out[e.op].record_writes += records;
    }
  }
  return out;
}

// Writes take one fixed path. Reads take the quiescent path, or the rescan
// path through the announce and rescan; each path has fixed counts and the rescan path
// is the maximum.
struct Pinned {
  Measured write;
  Measured read_max;
  Measured read_quiet;
};

Pinned pinned_c1(int n) {
  return {{n + 1, n + 1, 2 * n + 1, n + 1}, {2 * n + 4, n + 3, 2 * n + 4, n + 6}, {n + 3, n + 2, n + 3, n + 4}};
}

Outcome structure() {
  Outcome o;
  o.pass = true;
  std::string parts;
  for (int n : kStructureNs) {
    const auto un = static_cast<std::size_t>(n);
    const Census cs = census(build_memory(n, 2, Construction::c1));
    const bool cells_ok = cs.cells == (un + 1) * (un + 1);
    const bool records_ok = cs.records == (un + 1) * (un + 2) - 1 && cs.cells + cs.two_record_cells == cs.records &&
                            cs.two_record_cells == un;
    const int claimed_bits = 2 * static_cast<int>(std::ceil(std::log2(4.0 * n + 4.0)));
    const bool bits_ok = timestamp_bits(n) <= claimed_bits;

    // Every shape seen across random and adversarial schedules.
    std::set<std::tuple<int, int, int, int>> write_shapes, read_shapes;
    Measured read_max;
    const Workload w = make_workload(Construction::c1, n, 5, 3);
    for (std::uint64_t s = 0; s < kStructureSamples; ++s) {
      const Trace t = s % 3 == 2 ? run_adversary(w, Adversary::stall_after({static_cast<int>(s % un)}, s % 40, s))
                                 : run_random(w, s);
      const auto ops = operations(t);
      const auto m = measure(t);
      for (const OperationView& op : ops) {
        if (!op.complete()) continue;
        const Measured& x = m.at(op.id);
        auto shape = std::make_tuple(x.cell_reads, x.cell_writes, x.record_reads, x.record_writes);
        if (op.kind == OpKind::write) {
          write_shapes.insert(shape);
        } else {
          read_shapes.insert(shape);
          read_max.cell_reads = std::max(read_max.cell_reads, x.cell_reads);
          read_max.cell_writes = std::max(read_max.cell_writes, x.cell_writes);
          read_max.record_reads = std::max(read_max.record_reads, x.record_reads);
          read_max.record_writes = std::max(read_max.record_writes, x.record_writes);
        }
      }
    }
    const Pinned p = pinned_c1(n);
    auto tup = [](const Measured& x) { return std::make_tuple(x.cell_reads, x.cell_writes, x.record_reads, x.record_writes); };
    const bool write_ok = write_shapes == std::set{tup(p.write)};
    const bool read_ok = read_shapes == std::set{tup(p.read_quiet), tup(p.read_max)} && tup(read_max) == tup(p.read_max);
    const AccessProfile sw = static_access_profile(Construction::c1, OpKind::write, n);
    const AccessProfile sr = static_access_profile(Construction::c1, OpKind::read, n);
    const bool static_ok = tup({sw.cell_reads, sw.cell_writes, sw.record_reads, sw.record_writes}) == tup(p.write) &&
                           tup({sr.cell_reads, sr.cell_writes, sr.record_reads, sr.record_writes}) == tup(p.read_max);

    // Stated: Write scans 2n+1 and writes n+1; Read scans at most 2n+3 and writes at most n+3.
    const int read_scan_residual = p.read_max.record_reads - (2 * n + 3);
    const bool claims_ok = p.write.record_reads == 2 * n + 1 && p.write.record_writes == n + 1 &&
                           p.read_max.cell_writes == n + 3 && read_scan_residual == 1;

    const bool ok = cells_ok && records_ok && bits_ok && write_ok && read_ok && static_ok && claims_ok;
    o.pass = o.pass && ok;
    parts += std::string(parts.empty() ? "" : "; ") + "n=" + std::to_string(n) + (ok ? " ok" : " MISMATCH");
    o.notes.push_back(
        "n=" + std::to_string(n) + ": " + std::to_string(cs.cells) + " cells = " + std::to_string(cs.records) +
        " records - " + std::to_string(cs.two_record_cells) + " merged pairs; " + std::to_string(timestamp_bits(n)) +
        " control bits per record (bound " + std::to_string(claimed_bits) + "); Write reads " +
        std::to_string(p.write.record_reads) + " records / writes " + std::to_string(p.write.record_writes) +
        "; Read reads <= " + std::to_string(p.read_max.record_reads) + " records (stated " + std::to_string(2 * n + 3) +
        ", +" + std::to_string(read_scan_residual) + " from re-reading R[i][i]) / writes <= " +
        std::to_string(p.read_max.cell_writes) + " cells = " + std::to_string(p.read_max.record_writes) +
        " records; shapes seen: " + std::to_string(write_shapes.size()) + " Write, " +
        std::to_string(read_shapes.size()) + " Read");
  }
  o.summary = "structure and access counts of c1 for n in {1,2,3,8}: " + parts;
  return o;
}

// -- 5 ---------------------------------------------------------------------

Outcome wait_freedom() {
  Outcome o;
  o.pass = true;
  std::string parts;
  const int n = kAdversaryReaders;
  for (auto c : {Construction::c0, Construction::c1, Construction::c2}) {
    const Workload w = make_workload(c, n, 5, 3);
    std::mt19937_64 rng(0x5eed + static_cast<std::uint64_t>(c));
    int bad = 0;
    std::uint64_t completed = 0;
    for (int run = 0; run < kAdversaryRuns; ++run) {
      std::vector<int> stalled;
      for (int p = 0; p <= n; ++p) {
        if (rng() % 2) stalled.push_back(p);
      }
      const std::uint64_t cut = rng() % 80;
      const Trace t = run_adversary(w, Adversary::stall_after(stalled, cut, rng()));
      const Verdict bound = check_wait_free(t);
      // Processes never stalled must finish everything they were given.
      bool finished = true;
      for (const OperationView& op : operations(t)) {
        const bool is_stalled = std::find(stalled.begin(), stalled.end(), op.pid.index) != stalled.end();
        if (!is_stalled && !op.complete()) finished = false;
        if (op.complete()) ++completed;
      }
      for (int p = 0; p <= n; ++p) {
        if (std::find(stalled.begin(), stalled.end(), p) != stalled.end()) continue;
        int mine = 0;
        for (const OperationView& op : operations(t)) mine += op.pid.index == p && op.id != 0;
        if (mine != (p == n ? 4 : 3)) finished = false;
      }
      if (!bound.passed() || !finished) {
        if (bad++ == 0) o.notes.push_back(std::string(to_string(c)) + " run " + std::to_string(run) + ": " + bound.detail);
      }
    }
    int solo_bad = 0;
    for (int p = 0; p <= n; ++p) {
      const Trace t = run_adversary(w, Adversary::stall_all_but(p, 1));
      int mine = 0;
      for (const OperationView& op : operations(t)) {
        if (op.id == 0) continue;
        if (op.pid.index != p || !op.complete()) ++solo_bad;
        ++mine;
      }
      if (mine != (p == n ? 4 : 3) || !check_wait_free(t).passed()) ++solo_bad;
    }
    o.pass = o.pass && bad == 0 && solo_bad == 0;
    parts += std::string(parts.empty() ? "" : "; ") + std::string(to_string(c)) + " " + std::to_string(bad) +
             " bad runs, " + std::to_string(solo_bad) + " bad solo runs";
    o.notes.push_back(std::string(to_string(c)) + ": " + std::to_string(completed) +
                      " completed operations checked against bounds Write " +
                      std::to_string(step_bound(c, OpKind::write, n)) + ", Read " +
                      std::to_string(step_bound(c, OpKind::read, n)));
  }
  o.summary = "wait-freedom, n=2, " + std::to_string(kAdversaryRuns) +
              " random stall-subset/cut runs per construction plus each process alone: " + parts;
  return o;
}

// -- 6 ---------------------------------------------------------------------

Verdict everything(const Trace& t) { return standard_checks(t); }

Outcome mutation_writer_first() {
  Outcome o;
  std::uint64_t schedules = 0, failed = 0;
  std::vector<std::pair<int, int>> shapes{{2, 1}, {3, 1}, {3, 2}, {4, 2}};
  for (auto [writes, reads] : shapes) {
    const auto s = explore(make_workload(Construction::c0, 1, writes, reads, Mutation::c0_writer_first), everything);
    schedules += s.schedules;
    failed += s.failed;
    o.notes.push_back("n=1, init + " + std::to_string(writes - 1) + " Writes + " + std::to_string(reads) +
                      " Reads: " + std::to_string(s.schedules) + " schedules, " + std::to_string(s.failed) + " failures");
  }
  o.pass = failed > 0;
  o.summary = "mutation: c0 Read scans the writer first; exhaustive n=1: " + std::to_string(schedules) +
              " schedules, " + std::to_string(failed) + " failures";
  if (!o.pass) {
    o.notes.push_back(
        "with one reader the only other cell it scans is its own, whose tag never exceeds the writer's, so the scan "
        "order cannot change what it selects");
  }
  // Not part of the verdict: the smallest setting where the mutation shows.
  const Workload w2 = make_workload(Construction::c0, 2, 3, 1, Mutation::c0_writer_first);
  std::vector<int> schedule{0};
  schedule.insert(schedule.end(), 12, 2);
  schedule.insert(schedule.end(), 6, 1);
  const Verdict v = everything(run_schedule(w2, schedule));
  o.notes.push_back(std::string("n=2 hand-built schedule (supplementary): ") + std::string(to_string(v.status)) + ", " +
                    v.detail);
  return o;
}

Outcome mutation_free_reuse() {
  const auto s = explore(make_workload(Construction::c1, 1, 3, 1, Mutation::c1_free_reuse), everything);
  Outcome o;
  o.pass = s.failed > 0;
  o.summary = "mutation: c1 Write picks the least value other than its previous head; exhaustive n=1, init + 2 Writes + 1 Read: " +
              std::to_string(s.schedules) + " schedules, " + std::to_string(s.failed) + " failures";
  if (s.counterexample) o.notes.push_back("first: " + s.counterexample_detail);
  return o;
}

Outcome mutation_skip_announce() {
  Outcome o;
  std::uint64_t failed = 0;
  std::string where;
  for (int writes : {3, 4, 5}) {
    const auto s = explore(make_workload(Construction::c1, 1, writes, 1, Mutation::c1_skip_announce), everything,
                           writes == 5);
    failed += s.failed;
    o.notes.push_back("n=1, init + " + std::to_string(writes - 1) + " Writes + 1 Read: " + std::to_string(s.schedules) +
                      " schedules" + (writes == 5 ? " until the first failure" : "") + ", " +
                      std::to_string(s.failed) + " failures" +
                      (s.counterexample ? "; first: " + s.counterexample_detail : ""));
    if (s.failed > 0 && where.empty()) where = "init + " + std::to_string(writes - 1) + " Writes + 1 Read";
  }
  o.pass = failed > 0;
  o.summary = "mutation: c1 Read skips the rescan announce; exhaustive n=1: " +
              (o.pass ? "detected with " + where : std::string("not detected"));
  return o;
}

// -- 7 ---------------------------------------------------------------------

Outcome cross_validation() {
  CheckOptions pure;
  pure.try_constructive = false;
  auto agreement = [&](const Workload& w, std::uint64_t& agree, std::uint64_t& total, std::uint64_t& atomic) {
    explore(w, [&](const Trace& t) {
      const bool a = find_linearization(t, pure).passed();
      const bool b = check_timestamps(t, constructive_timestamps(t)).passed();
      ++total;
      agree += a == b;
      atomic += a;
      return Verdict::ok("cross");
    });
  };
  std::uint64_t agree = 0, total = 0, atomic = 0;
  agreement(make_workload(Construction::c1, 1, 3, 1), agree, total, atomic);
  Outcome o;
  o.pass = total > 0 && agree == total;
  o.summary = "search-based atomicity vs constructive timestamps on every c1 n=1 trace: " + std::to_string(agree) + "/" +
              std::to_string(total) + " agree (" + std::to_string(atomic) + " atomic)";
  return o;
}

// -- 8 ---------------------------------------------------------------------

Outcome replica_census() {
  Outcome o;
  o.pass = true;
  std::string parts;
  for (int n : kCensusNs) {
    const Census cs = census(build_memory(n, 2, Construction::c2));
    const bool ok = cs.writer_value_fields == 2 * static_cast<std::size_t>(n + 1) && cs.reader_value_fields == 0;
    // Reader-owned records must stay value-free for the whole run.
    std::uint64_t reader_values = 0;
    const Trace t = run_random(make_workload(Construction::c2, n, 4, 2), static_cast<std::uint64_t>(n));
    for (const Event& e : t.events) {
      if (e.kind != EventKind::cell_write || e.pid.index == n) continue;
      for (const Record& r : e.payload.records()) reader_values += r.value.has_value() || r.replicas.has_value();
    }
    o.pass = o.pass && ok && reader_values == 0;
    parts += std::string(parts.empty() ? "" : ", ") + "n=" + std::to_string(n) + ": " +
             std::to_string(cs.writer_value_fields) + "/" + std::to_string(cs.reader_value_fields) +
             (reader_values ? " (reader wrote a value)" : "");
  }
  o.summary = "c2 value fields, writer/reader: " + parts;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string only;
  bool verbose = true;
  app.add_option("--only", only, "run a single criterion (1, 2, 3, 4, 5, 6a, 6b, 6c, 7, 8)");
  app.add_flag("!--quiet", verbose, "omit detail lines");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1", exhaustive_c0},         {"2", exhaustive_c1},          {"3", random_sweep},
      {"4", structure},             {"5", wait_freedom},           {"6a", mutation_writer_first},
      {"6b", mutation_free_reuse},  {"6c", mutation_skip_announce}, {"7", cross_validation},
      {"8", replica_census}};

  bool all = true;
  bool any = false;
  for (const auto& [id, run] : criteria) {
    if (!only.empty() && only != id) continue;
    any = true;
    Stopwatch clock;
    const Outcome o = run();
    all = all && o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << id << "  " << o.summary << "  [" << fmt(clock.seconds()) << " s]\n";
    if (verbose) {
      for (const std::string& note : o.notes) std::cout << "       " << note << '\n';
    }
    std::cout.flush();
  }
  if (!any) {
    std::cerr << "no criterion \"" << only << "\"\n";
    return 2;
  }
  return all ? 0 : 1;
}
