#pragma once

#include <string>
#include <vector>

#include "wfreg/types.hpp"

namespace wfreg {

enum class Status : std::uint8_t { pass, fail, refused };

constexpr std::string_view to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::refused: return "refused";
  }
  return "?";
}

/// Outcome of one check. A failure carries a readable counterexample in
/// `detail`; a passing linearization check carries the order it found.
struct Verdict {
  std::string check;
  Status status = Status::pass;
  std::string detail;
  std::vector<OpId> order;

  bool passed() const { return status == Status::pass; }

  static Verdict ok(std::string check, std::string detail = {}) {
    return {std::move(check), Status::pass, std::move(detail), {}};
  }
  static Verdict failure(std::string check, std::string detail) {
    return {std::move(check), Status::fail, std::move(detail), {}};
  }
  static Verdict refusal(std::string check, std::string detail) {
    return {std::move(check), Status::refused, std::move(detail), {}};
  }
};

/// Folds several verdicts: the first non-passing one wins.
inline Verdict combine(std::string check, const std::vector<Verdict>& parts) {
  for (const Verdict& v : parts) {
    if (!v.passed()) return {std::move(check), v.status, v.check + ": " + v.detail, {}};
  }
  return Verdict::ok(std::move(check));
}

}  // namespace wfreg
