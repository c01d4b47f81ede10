// Runs one random c1 schedule with two readers, prints its operations and
// verdicts, then explores every interleaving of the smallest workload.
#include <iostream>

#include "wfreg/wfreg.hpp"

using namespace wfreg;

int main() {
  const Workload w = make_workload(Construction::c1, 2, 4, 2, Mutation::none);
  const Trace t = run_random(w, 42);
  for (const OperationView& op : operations(t)) {
    std::cout << (op.kind == OpKind::write ? "write " : "read  ") << "p" << op.pid.index << " value " << op.value
              << " in " << op.steps << " accesses";
    if (op.read_case) std::cout << ", case " << to_string(*op.read_case);
    std::cout << '\n';
  }
  std::cout << to_string(standard_checks(t).status) << " on seed 42\n";

  const Workload tiny = make_workload(Construction::c1, 1, 3, 1, Mutation::none);
  const ExploreSummary s = explore_exhaustive(tiny, [](const Trace& x) { return standard_checks(x); });
  std::cout << s.schedules << " interleavings, " << s.failed << " failures\n";
  return s.failed == 0 ? 0 : 1;
}
