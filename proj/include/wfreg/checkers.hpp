// Register-semantics checkers over complete proper histories.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include "wfreg/constructions.hpp"
#include "wfreg/trace.hpp"
#include "wfreg/verdict.hpp"

namespace wfreg {

namespace detail {
__extension__ using Wide = __int128;
}  // namespace detail

/// Exact rational, kept in lowest terms with a positive denominator.
class Rational {
 public:
  constexpr Rational(std::int64_t num = 0, std::int64_t den = 1) : num_(num), den_(den) {
    if (den_ == 0) throw std::invalid_argument("zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  constexpr std::int64_t num() const { return num_; }
  constexpr std::int64_t den() const { return den_; }

  friend constexpr bool operator==(const Rational&, const Rational&) = default;
  friend constexpr std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    return static_cast<detail::Wide>(a.num_) * b.den_ <=> static_cast<detail::Wide>(b.num_) * a.den_;
  }

 private:
  std::int64_t num_;
  std::int64_t den_;
};

inline std::string to_string(const Rational& r) {
  return r.den() == 1 ? std::to_string(r.num()) : std::to_string(r.num()) + "/" + std::to_string(r.den());
}

struct CheckOptions {
  /// Keep pending Writes as operations that respond after everything
  /// else, instead of refusing the history.
  bool extend_pending_writes = false;
  /// Linearization search gives up beyond this many operations.
  std::size_t max_ops = 24;
  /// Try the order implied by ghost metadata before searching.
  bool try_constructive = true;
};

namespace detail {

inline std::string describe(const OperationView& op) {
  std::string s = op.kind == OpKind::write ? "Write" : "Read";
  s += "#" + std::to_string(op.id) + "(p" + std::to_string(op.pid.index);
  s += op.kind == OpKind::write ? ", v=" : " -> ";
  s += std::to_string(op.value) + ")";
  return s;
}

/// Operations of a complete proper history, or a refusal.
inline std::variant<std::vector<OperationView>, Verdict> prepare(const Trace& t, const std::string& check,
                                                                 const CheckOptions& opts) {
  std::vector<OperationView> ops;
  for (const OperationView& op : operations(t)) {
    if (op.complete()) {
      ops.push_back(op);
    } else if (op.kind == OpKind::write) {
      if (!opts.extend_pending_writes) {
        return Verdict::refusal(check, "history incomplete: " + describe(op) + " is pending");
      }
      ops.push_back(op);
    }
    // pending Reads are dropped
  }
  if (ops.empty() || ops.front().kind != OpKind::write) {
    return Verdict::refusal(check, "history is not proper: no initializing Write");
  }
  for (std::size_t k = 1; k < ops.size(); ++k) {
    if (!precedes(ops.front(), ops[k])) {
      return Verdict::refusal(check, "history is not proper: initializing Write overlaps " + describe(ops[k]));
    }
  }
  return ops;
}

/// Value of the last Write preceding `r`, and the Writes overlapping it.
struct ReadContext {
  const OperationView* latest = nullptr;
  std::vector<const OperationView*> overlapping;
};

inline ReadContext context_of(const OperationView& r, const std::vector<OperationView>& ops) {
  ReadContext ctx;
  for (const OperationView& w : ops) {
    if (w.kind != OpKind::write) continue;
    if (precedes(w, r)) {
      if (!ctx.latest || *ctx.latest->respond < *w.respond) ctx.latest = &w;
    } else if (!precedes(r, w)) {
      ctx.overlapping.push_back(&w);
    }
  }
  return ctx;
}

}  // namespace detail

/// Every Read overlapping no Write returns the latest preceding Write's value.
inline Verdict check_safe(const Trace& t, const CheckOptions& opts = {}) {
  auto prepared = detail::prepare(t, "safe", opts);
  if (auto* v = std::get_if<Verdict>(&prepared)) return *v;
  const auto& ops = std::get<std::vector<OperationView>>(prepared);
  for (const OperationView& r : ops) {
    if (r.kind != OpKind::read) continue;
    const auto ctx = detail::context_of(r, ops);
    if (!ctx.overlapping.empty()) continue;
    if (!ctx.latest || ctx.latest->value != r.value) {
      return Verdict::failure("safe", detail::describe(r) + " overlaps no Write but the latest preceding is " +
                                          (ctx.latest ? detail::describe(*ctx.latest) : std::string("none")));
    }
  }
  return Verdict::ok("safe");
}

/// Every Read returns the latest preceding Write's value or an overlapping one's.
inline Verdict check_regular(const Trace& t, const CheckOptions& opts = {}) {
  auto prepared = detail::prepare(t, "regular", opts);
  if (auto* v = std::get_if<Verdict>(&prepared)) return *v;
  const auto& ops = std::get<std::vector<OperationView>>(prepared);
  for (const OperationView& r : ops) {
    if (r.kind != OpKind::read) continue;
    const auto ctx = detail::context_of(r, ops);
    bool ok = ctx.latest && ctx.latest->value == r.value;
    for (const OperationView* w : ctx.overlapping) ok = ok || w->value == r.value;
    if (!ok) {
      return Verdict::failure("regular", detail::describe(r) + " returned neither the latest preceding (" +
                                             (ctx.latest ? detail::describe(*ctx.latest) : std::string("none")) +
                                             ") nor an overlapping Write's value");
    }
  }
  return Verdict::ok("regular");
}

namespace detail {

/// Replays `order` through a sequential register and checks that it
/// extends precedence. Empty string on success.
inline std::string validate_order(const std::vector<OperationView>& ops, const std::vector<std::size_t>& order) {
  std::vector<std::size_t> position(ops.size(), SIZE_MAX);
  for (std::size_t k = 0; k < order.size(); ++k) position[order[k]] = k;
  for (std::size_t a = 0; a < ops.size(); ++a) {
    if (position[a] == SIZE_MAX && ops[a].complete()) return describe(ops[a]) + " missing from order";
  }
  for (std::size_t a = 0; a < ops.size(); ++a) {
    for (std::size_t b = 0; b < ops.size(); ++b) {
      if (position[a] == SIZE_MAX || position[b] == SIZE_MAX) continue;
      if (precedes(ops[a], ops[b]) && position[a] > position[b]) {
        return describe(ops[a]) + " precedes " + describe(ops[b]) + " but is ordered after it";
      }
    }
  }
  std::optional<Value> current;
  for (std::size_t k : order) {
    const OperationView& op = ops[k];
    if (op.kind == OpKind::write) {
      current = op.value;
    } else if (current != op.value) {
      return describe(op) + " does not return the value of the Write ordered before it";
    }
  }
  return {};
}

/// Candidate taken from ghost metadata: Writes in sequence order, each
/// followed by the Reads that returned its value, in invocation order.
inline std::vector<std::size_t> constructive_order(const std::vector<OperationView>& ops) {
  std::vector<std::size_t> idx(ops.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = ops[a];
    const auto& y = ops[b];
    if (x.ghost != y.ghost) return x.ghost < y.ghost;
    if (x.kind != y.kind) return x.kind == OpKind::write;
    return x.invoke < y.invoke;
  });
  return idx;
}

/// Names the most specific reason no linearization exists, when one of the
/// classic patterns applies.
inline std::string explain_failure(const std::vector<OperationView>& ops) {
  auto writes_of = [&](Value v) {
    std::vector<const OperationView*> out;
    for (const auto& w : ops) {
      if (w.kind == OpKind::write && w.value == v) out.push_back(&w);
    }
    return out;
  };
  for (const auto& r : ops) {
    if (r.kind != OpKind::read) continue;
    const auto cands = writes_of(r.value);
    bool any = false;
    for (const auto* w : cands) any = any || !precedes(r, *w);
    if (!any) return describe(r) + " returned a value written by no Write it does not precede";
    bool all_overwritten = true;
    for (const auto* w : cands) {
      bool overwritten = false;
      for (const auto& w2 : ops) {
        if (w2.kind == OpKind::write && precedes(*w, w2) && precedes(w2, r)) overwritten = true;
      }
      all_overwritten = all_overwritten && overwritten;
    }
    if (all_overwritten) return describe(r) + " returned a value already overwritten before it started";
  }
  for (const auto& r1 : ops) {
    for (const auto& r2 : ops) {
      if (r1.kind != OpKind::read || r2.kind != OpKind::read || !precedes(r1, r2)) continue;
      const auto c1 = writes_of(r1.value);
      const auto c2 = writes_of(r2.value);
      if (c1.size() != 1 || c2.size() != 1) continue;
      if (precedes(*c2.front(), *c1.front())) {
        return "new-old inversion: " + describe(r1) + " precedes " + describe(r2) + " but returns the later " +
               describe(*c1.front()) + " while it returns the earlier " + describe(*c2.front());
      }
    }
  }
  return "no total order extends precedence while respecting register semantics";
}

class LinearizationSearch {
 public:
  explicit LinearizationSearch(const std::vector<OperationView>& ops) : ops_(ops) {
    const std::size_t k = ops.size();
    preds_.assign(k, 0);
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) {
        if (a != b && precedes(ops[a], ops[b])) preds_[b] |= bit(a);
      }
      if (ops[a].complete()) required_ |= bit(a);
    }
  }

  std::optional<std::vector<std::size_t>> run() {
    order_.clear();
    if (search(0, std::nullopt)) return order_;
    return std::nullopt;
  }

  std::size_t states() const { return failed_.size(); }

 private:
  static std::uint32_t bit(std::size_t k) { return std::uint32_t{1} << k; }

  bool search(std::uint32_t done, std::optional<Value> current) {
    if ((done & required_) == required_) return true;
    const std::uint64_t key = (static_cast<std::uint64_t>(done) << 32) |
                              (current ? static_cast<std::uint32_t>(*current) + 1u : 0u);
    if (failed_.count(key)) return false;
    const std::size_t mark = order_.size();
    // Reads of the current value can always go first.
    std::uint32_t greedy = done;
    bool moved = true;
    while (moved) {
      moved = false;
      for (std::size_t x = 0; x < ops_.size(); ++x) {
        if ((greedy & bit(x)) || (preds_[x] & ~greedy) || ops_[x].kind != OpKind::read) continue;
        if (current == ops_[x].value) {
          greedy |= bit(x);
          order_.push_back(x);
          moved = true;
        }
      }
    }
    if ((greedy & required_) == required_) return true;
    for (std::size_t x = 0; x < ops_.size(); ++x) {
      if ((greedy & bit(x)) || (preds_[x] & ~greedy) || ops_[x].kind != OpKind::write) continue;
      order_.push_back(x);
      if (search(greedy | bit(x), ops_[x].value)) return true;
      order_.pop_back();
    }
    order_.resize(mark);
    failed_.insert(key);
    return false;
  }

  const std::vector<OperationView>& ops_;
  std::vector<std::uint32_t> preds_;
  std::uint32_t required_ = 0;
  std::vector<std::size_t> order_;
  std::unordered_set<std::uint64_t> failed_;
};

}  // namespace detail

/// Searches for a total order extending precedence in which every Read
/// returns the value of the last Write before it.
inline Verdict find_linearization(const Trace& t, const CheckOptions& opts = {}) {
  auto prepared = detail::prepare(t, "linearizable", opts);
  if (auto* v = std::get_if<Verdict>(&prepared)) return *v;
  const auto& ops = std::get<std::vector<OperationView>>(prepared);

  auto accept = [&](const std::vector<std::size_t>& order, std::string how) {
    Verdict v = Verdict::ok("linearizable", std::move(how));
    for (std::size_t k : order) v.order.push_back(ops[k].id);
    return v;
  };

  if (opts.try_constructive) {
    const auto candidate = detail::constructive_order(ops);
    if (detail::validate_order(ops, candidate).empty()) return accept(candidate, "constructive order");
  }
  if (ops.size() > opts.max_ops || ops.size() > 32) {
    return Verdict::refusal("linearizable", std::to_string(ops.size()) + " operations exceed the search limit of " +
                                                std::to_string(opts.max_ops));
  }
  detail::LinearizationSearch search(ops);
  if (auto order = search.run()) {
    const std::string problem = detail::validate_order(ops, *order);
    if (!problem.empty()) throw std::logic_error("linearization search produced an invalid order: " + problem);
    return accept(*order, "search");
  }
  return Verdict::failure("linearizable", detail::explain_failure(ops));
}

/// Atomicity; also asserts that an atomic history is regular and safe.
inline Verdict check_atomic(const Trace& t, const CheckOptions& opts = {}) {
  Verdict v = find_linearization(t, opts);
  v.check = "atomic";
  if (v.passed()) {
    if (!check_regular(t, opts).passed() || !check_safe(t, opts).passed()) {
      throw std::logic_error("atomic history failed a weaker register condition");
    }
  }
  return v;
}

using TimestampAssignment = std::map<OpId, Rational>;

/// The three timestamp conditions: distinct Write timestamps, every Read
/// matching a same-valued Write it does not precede, and precedence
/// never decreasing the timestamp.
inline Verdict check_timestamps(const Trace& t, const TimestampAssignment& ts, const CheckOptions& opts = {}) {
  auto prepared = detail::prepare(t, "timestamps", opts);
  if (auto* v = std::get_if<Verdict>(&prepared)) return *v;
  const auto& ops = std::get<std::vector<OperationView>>(prepared);
  for (const auto& op : ops) {
    if (!ts.count(op.id)) return Verdict::failure("timestamps", "no timestamp for " + detail::describe(op));
  }
  auto stamp = [&](const OperationView& op) { return ts.at(op.id); };
  for (std::size_t a = 0; a < ops.size(); ++a) {
    for (std::size_t b = a + 1; b < ops.size(); ++b) {
      if (ops[a].kind == OpKind::write && ops[b].kind == OpKind::write && stamp(ops[a]) == stamp(ops[b])) {
        return Verdict::failure("timestamps", "uniqueness: " + detail::describe(ops[a]) + " and " +
                                                  detail::describe(ops[b]) + " share timestamp " +
                                                  to_string(stamp(ops[a])));
      }
    }
  }
  for (const auto& r : ops) {
    if (r.kind != OpKind::read) continue;
    bool found = false;
    for (const auto& w : ops) {
      if (w.kind == OpKind::write && stamp(w) == stamp(r) && w.value == r.value && !precedes(r, w)) found = true;
    }
    if (!found) {
      return Verdict::failure("timestamps", "integrity: no Write with the timestamp and value of " +
                                                detail::describe(r) + " that it does not precede");
    }
  }
  for (const auto& a : ops) {
    for (const auto& b : ops) {
      if (precedes(a, b) && stamp(b) < stamp(a)) {
        return Verdict::failure("timestamps", "precedence: " + detail::describe(a) + " precedes " +
                                                  detail::describe(b) + " but has the larger timestamp");
      }
    }
  }
  return Verdict::ok("timestamps");
}

/// The timestamps a run itself implies: c0 uses the integer tags its
/// operations distribute; c1/c2 use the ghost sequence number of each Write,
/// and for each Read that of the Write whose value it returned.
inline TimestampAssignment constructive_timestamps(const Trace& t) {
  TimestampAssignment ts;
  if (t.workload.construction == Construction::c0) {
    std::map<OpId, std::uint64_t> tag;
    for (const Event& e : t.events) {
      if (e.kind == EventKind::cell_write && e.line == Line::l4) tag[e.op] = e.payload[0].tag;
    }
    for (auto& [op, g] : tag) ts[op] = Rational(static_cast<std::int64_t>(g));
    return ts;
  }
  for (const OperationView& op : operations(t)) ts[op.id] = Rational(static_cast<std::int64_t>(op.ghost));
  return ts;
}

struct StepBounds {
  int write = 0;
  int read = 0;

  static StepBounds of(Construction c, int n) { return {step_bound(c, OpKind::write, n), step_bound(c, OpKind::read, n)}; }
};

/// Every completed operation used at most its bound of cell accesses.
inline Verdict check_wait_free(const Trace& t, const StepBounds& bounds) {
  for (const OperationView& op : operations(t)) {
    if (!op.complete()) continue;
    const int bound = op.kind == OpKind::write ? bounds.write : bounds.read;
    if (op.steps > bound) {
      return Verdict::failure("wait-free", detail::describe(op) + " took " + std::to_string(op.steps) +
                                               " accesses, bound " + std::to_string(bound));
    }
  }
  return Verdict::ok("wait-free");
}

inline Verdict check_wait_free(const Trace& t) {
  return check_wait_free(t, StepBounds::of(t.workload.construction, t.workload.n));
}

}  // namespace wfreg
