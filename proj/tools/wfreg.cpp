// wfreg: simulate, explore, and re-check register runs from the command line.
//
// Exit codes: 0 all checks pass, 1 a check failed or refused, 2 usage or
// configuration error, 3 trace parse error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wfreg/wfreg.hpp"

using nlohmann::json;
using namespace wfreg;

namespace {

constexpr int kPass = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;
constexpr int kParse = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WorkloadFlags {
  std::string construction = "c1";
  int n = 1;
  int writes = 1;
  int reads = 1;
  std::string mutation = "none";

  void add_to(CLI::App& app) {
    app.add_option("--construction", construction, "c0, c1 or c2")->capture_default_str();
    app.add_option("--n", n, "number of readers")->capture_default_str();
    app.add_option("--writes", writes, "Writes after the initializing one")->capture_default_str();
    app.add_option("--reads", reads, "Reads per reader")->capture_default_str();
    app.add_option("--mutation", mutation, "none, c0-writer-first, c1-free-reuse, c1-skip-announce")
        ->capture_default_str();
  }

  Workload build() const {
    const auto c = parse_construction(construction);
    if (!c) throw ConfigError("unknown construction \"" + construction + "\"");
    const auto m = parse_mutation(mutation);
    if (!m) throw ConfigError("unknown mutation \"" + mutation + "\"");
    if (n < 1) throw ConfigError("--n must be at least 1");
    if (writes < 0) throw ConfigError("--writes must not be negative");
    if (reads < 0) throw ConfigError("--reads must not be negative");
    Workload w = make_workload(*c, n, writes + 1, reads, *m);
    try {
      w.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    return w;
  }
};

json workload_json(const Workload& w) {
  return {{"construction", std::string(to_string(w.construction))},
          {"n", w.n},
          {"writes", static_cast<int>(w.writes.size()) - 1},
          {"reads_per_reader", w.reads_per_reader},
          {"mutation", std::string(to_string(w.mutation))}};
}

json verdicts_json(const std::vector<Verdict>& vs) {
  json out = json::array();
  for (const Verdict& v : vs) out.push_back(to_json(v));
  return out;
}

bool all_pass(const std::vector<Verdict>& vs) {
  return std::all_of(vs.begin(), vs.end(), [](const Verdict& v) { return v.passed(); });
}

std::vector<Verdict> trace_verdicts(const Trace& t, bool with_ghost, const CheckOptions& opts) {
  std::vector<Verdict> vs{check_safe(t, opts), check_regular(t, opts), check_atomic(t, opts), check_wait_free(t)};
  if (with_ghost) {
    vs.push_back(check_timestamps(t, constructive_timestamps(t), opts));
    for (Verdict& v : run_monitors(t).parts) vs.push_back(std::move(v));
  }
  return vs;
}

json ops_json(const Trace& t) {
  json out = json::array();
  for (const OperationView& op : operations(t)) {
    json j = {{"op", op.id}, {"pid", op.pid.index}, {"kind", op.kind == OpKind::write ? "write" : "read"},
              {"complete", op.complete()}, {"steps", op.steps}};
    if (op.complete() || op.kind == OpKind::write) j["value"] = op.value;
    if (op.read_case) j["case"] = std::string(to_string(*op.read_case));
    out.push_back(j);
  }
  return out;
}

std::string indexed_path(const std::string& path, int k, int runs) {
  if (runs == 1) return path;
  const auto dot = path.rfind('.');
  const auto slash = path.find_last_of('/');
  const std::string tag = "." + std::to_string(k);
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + tag;
  return path.substr(0, dot) + tag + path.substr(dot);
}

void save(const std::string& path, const Trace& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write \"" + path + "\"");
  write_trace(os, t);
}

std::string join(const std::vector<int>& xs) {
  std::string s;
  for (std::size_t k = 0; k < xs.size(); ++k) s += (k ? "," : "") + std::to_string(xs[k]);
  return s;
}

// -- simulate --------------------------------------------------------------

struct SimulateFlags {
  WorkloadFlags workload;
  std::uint64_t seed = 0;
  int runs = 1;
  std::string mode = "random";
  std::vector<int> schedule;
  std::optional<int> solo;
  std::vector<int> stall;
  std::uint64_t cut = 0;
  std::string out;
};

int cmd_simulate(const SimulateFlags& f) {
  const Workload w = f.workload.build();
  if (f.runs < 1) throw ConfigError("--runs must be at least 1");
  std::string mode = f.mode;
  if (!f.schedule.empty()) mode = "replay";
  if (f.solo || !f.stall.empty()) mode = "adversary";
  if (mode != "random" && mode != "adversary" && mode != "replay") throw ConfigError("unknown mode \"" + mode + "\"");
  if (f.solo && (*f.solo < 0 || *f.solo > w.n)) throw ConfigError("--solo names no process");
  for (int p : f.stall) {
    if (p < 0 || p > w.n) throw ConfigError("--stall names no process");
  }
  if (mode == "adversary" && !f.solo && f.stall.empty()) throw ConfigError("adversary mode needs --solo or --stall");

  json report = {{"command", "simulate"}, {"workload", workload_json(w)}, {"mode", mode}};
  json runs = json::array();
  bool ok = true;
  const int count = mode == "replay" ? 1 : f.runs;
  for (int k = 0; k < count; ++k) {
    const std::uint64_t seed = f.seed + static_cast<std::uint64_t>(k);
    Trace t;
    try {
      if (mode == "random") {
        t = run_random(w, seed);
      } else if (mode == "replay") {
        t = run_schedule(w, f.schedule);
      } else {
        const Adversary adv = f.solo ? Adversary::stall_all_but(*f.solo, seed) : Adversary::stall_after(f.stall, f.cut, seed);
        t = run_adversary(w, adv);
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("schedule: ") + e.what());
    }
    CheckOptions opts;
    opts.extend_pending_writes = mode == "adversary";
    const auto vs = trace_verdicts(t, true, opts);
    ok = ok && all_pass(vs);
    json run = {{"seed", seed}, {"status", all_pass(vs) ? "pass" : "fail"}, {"verdicts", verdicts_json(vs)},
                {"operations", ops_json(t)}};
    if (mode == "replay") run.erase("seed");
    if (!f.out.empty()) {
      const std::string path = indexed_path(f.out, k, count);
      save(path, t);
      run["trace"] = path;
    }
    runs.push_back(run);
  }
  report["runs"] = runs;
  report["status"] = ok ? "pass" : "fail";
  std::cout << report.dump(2) << '\n';
  return ok ? kPass : kCheckFailed;
}

// -- explore ---------------------------------------------------------------

struct ExploreFlags {
  WorkloadFlags workload;
  std::uint64_t ceiling = ExploreOptions{}.ceiling;
  bool stop_on_first = false;
};

int cmd_explore(const ExploreFlags& f) {
  const Workload w = f.workload.build();
  ExploreOptions opts;
  opts.ceiling = f.ceiling;
  opts.stop_on_first_failure = f.stop_on_first;
  json report = {{"command", "explore"}, {"workload", workload_json(w)}, {"ceiling", f.ceiling}};
  ExploreSummary s;
  try {
    s = explore_exhaustive(w, [](const Trace& t) { return standard_checks(t); }, opts);
  } catch (const CeilingExceeded& e) {
    report["status"] = "refused";
    report["estimate"] = e.estimate();
    report["detail"] = e.what();
    std::cout << report.dump(2) << '\n';
    std::cerr << e.what() << '\n';
    return kUsage;
  }
  report["estimate"] = s.estimate;
  report["schedules"] = s.schedules;
  report["passed"] = s.passed;
  report["failed"] = s.failed;
  report["summary"] = std::to_string(s.schedules) + " schedules, " + std::to_string(s.failed) + " failures";
  if (s.counterexample) {
    report["counterexample"] = {{"schedule", *s.counterexample},
                                {"schedule_arg", join(*s.counterexample)},
                                {"detail", s.counterexample_detail}};
  } else {
    report["counterexample"] = nullptr;
  }
  report["status"] = s.failed == 0 ? "pass" : "fail";
  std::cout << report.dump(2) << '\n';
  return s.failed == 0 ? kPass : kCheckFailed;
}

// -- check -----------------------------------------------------------------

int cmd_check(const std::string& path, bool extend_pending) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open \"" + path + "\"");
  ParsedTrace parsed;
  try {
    parsed = parse_trace(is);
  } catch (const ParseError& e) {
    json report = {{"command", "check"}, {"file", path}, {"status", "parse-error"}, {"line", e.line()},
                   {"detail", e.what()}};
    std::cout << report.dump(2) << '\n';
    std::cerr << path << ": " << e.what() << '\n';
    return kParse;
  }
  CheckOptions opts;
  opts.extend_pending_writes = extend_pending;
  const auto vs = trace_verdicts(parsed.trace, parsed.has_ghost, opts);
  json report = {{"command", "check"},
                 {"file", path},
                 {"workload", workload_json(parsed.trace.workload)},
                 {"ghost", parsed.has_ghost},
                 {"verdicts", verdicts_json(vs)},
                 {"status", all_pass(vs) ? "pass" : "fail"}};
  std::cout << report.dump(2) << '\n';
  return all_pass(vs) ? kPass : kCheckFailed;
}

int cmd_strip_ghost(const std::string& in, const std::string& out) {
  std::ifstream is(in, std::ios::binary);
  if (!is) throw ConfigError("cannot open \"" + in + "\"");
  std::ostringstream buf;
  try {
    strip_ghost(is, buf);
  } catch (const ParseError& e) {
    std::cerr << in << ": " << e.what() << '\n';
    return kParse;
  }
  if (out.empty()) {
    std::cout << buf.str();
  } else {
    std::ofstream os(out, std::ios::binary);
    if (!os) throw ConfigError("cannot write \"" + out + "\"");
    os << buf.str();
  }
  return kPass;
}

// -- complexity ------------------------------------------------------------

json profile_json(const AccessProfile& p) {
  return {{"cell_reads", p.cell_reads}, {"cell_writes", p.cell_writes}, {"record_reads", p.record_reads},
          {"record_writes", p.record_writes}};
}

int cmd_complexity(std::vector<int> ns, std::vector<std::string> constructions, int samples) {
  if (ns.empty()) ns = {1, 2, 3, 8};
  if (constructions.empty()) constructions = {"c0", "c1", "c2"};
  if (samples < 0) throw ConfigError("--samples must not be negative");
  json rows = json::array();
  for (const std::string& name : constructions) {
    const auto c = parse_construction(name);
    if (!c) throw ConfigError("unknown construction \"" + name + "\"");
    for (int n : ns) {
      if (n < 1) throw ConfigError("--n values must be at least 1");
      const Census cs = census(build_memory(n, 2, *c));
      json row = {{"construction", name},
                  {"n", n},
                  {"cells", cs.cells},
                  {"two_record_cells", cs.two_record_cells},
                  {"records", cs.records},
                  {"writer_value_fields", cs.writer_value_fields},
                  {"reader_value_fields", cs.reader_value_fields},
                  {"step_bound", {{"write", step_bound(*c, OpKind::write, n)}, {"read", step_bound(*c, OpKind::read, n)}}},
                  {"write_profile", profile_json(static_access_profile(*c, OpKind::write, n))},
                  {"read_profile", profile_json(static_access_profile(*c, OpKind::read, n))}};
      row["bits_per_record"] = is_bounded(*c) ? json(timestamp_bits(n)) : json(nullptr);
      int max_write = 0, max_read = 0;
      const Workload w = make_workload(*c, n, 4, 2, Mutation::none);
      for (int s = 0; s < samples; ++s) {
        for (const OperationView& op : operations(run_random(w, static_cast<std::uint64_t>(s)))) {
          (op.kind == OpKind::write ? max_write : max_read) = std::max(op.kind == OpKind::write ? max_write : max_read, op.steps);
        }
      }
      if (samples > 0) row["observed_max_steps"] = {{"write", max_write}, {"read", max_read}, {"samples", samples}};
      rows.push_back(row);
    }
  }
  std::cout << json{{"command", "complexity"}, {"rows", rows}}.dump(2) << '\n';
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulate and check wait-free 1-writer n-reader atomic register constructions"};
  app.require_subcommand(1);

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "run scheduled simulations and check each trace");
  sim.workload.add_to(*simulate);
  simulate->add_option("--seed", sim.seed, "first seed; run k uses seed + k")->capture_default_str();
  simulate->add_option("--runs", sim.runs, "number of runs")->capture_default_str();
  simulate->add_option("--mode", sim.mode, "random, adversary or replay")->capture_default_str();
  simulate->add_option("--schedule", sim.schedule, "explicit schedule of process ids (replay)")->delimiter(',');
  simulate->add_option("--solo", sim.solo, "adversary: only this process runs");
  simulate->add_option("--stall", sim.stall, "adversary: processes stopped after --cut steps")->delimiter(',');
  simulate->add_option("--cut", sim.cut, "adversary: steps before the stall")->capture_default_str();
  simulate->add_option("--out", sim.out, "trace file; with several runs an index is inserted");

  ExploreFlags exp;
  auto* explore = app.add_subcommand("explore", "check every interleaving of a small workload");
  exp.workload.add_to(*explore);
  explore->add_option("--ceiling", exp.ceiling, "refuse above this many schedules")->capture_default_str();
  explore->add_flag("--stop-on-first", exp.stop_on_first, "stop at the first failing schedule");

  std::string check_path;
  bool extend_pending = false;
  auto* check = app.add_subcommand("check", "re-run every checker on a trace file");
  check->add_option("trace", check_path, "trace file")->required();
  check->add_flag("--extend-pending", extend_pending, "treat pending Writes as responding at the end");

  std::string strip_in, strip_out;
  auto* strip = app.add_subcommand("strip-ghost", "remove verification-only fields from a trace");
  strip->add_option("trace", strip_in, "trace file")->required();
  strip->add_option("--out", strip_out, "output file (default stdout)");

  std::vector<int> ns;
  std::vector<std::string> cs;
  int samples = 200;
  auto* complexity = app.add_subcommand("complexity", "report structure and access counts");
  complexity->add_option("--n", ns, "reader counts (default 1 2 3 8)");
  complexity->add_option("--construction", cs, "constructions (default all)");
  complexity->add_option("--samples", samples, "random runs measured per row")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*explore) return cmd_explore(exp);
    if (*check) return cmd_check(check_path, extend_pending);
    if (*strip) return cmd_strip_ghost(strip_in, strip_out);
    if (*complexity) return cmd_complexity(ns, cs, samples);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
