// Bounded (tail, head) timestamps and their domination relation.
#pragma once

#include <bit>
#include <span>
#include <stdexcept>
#include <vector>

#include "wfreg/types.hpp"

namespace wfreg {

/// Largest field value for n readers; fields range over bottom and 0..4n+2.
constexpr int max_field(int n) { return 4 * n + 2; }

constexpr bool field_in_domain(Field f, int n) {
  return f.is_bottom() || (f.value() >= 0 && f.value() <= max_field(n));
}

constexpr bool in_domain(Timestamp ts, int n) {
  return field_in_domain(ts.tail, n) && field_in_domain(ts.head, n);
}

/// a < b: b dominates a.
///
/// Holds iff a.head == b.tail with a.tail != b.head and b.head not bottom,
/// or a is (bottom, bottom) and b.head is not bottom.
constexpr bool dominates(Timestamp a, Timestamp b) {
  if (a.head == b.tail && a.tail != b.head && !b.head.is_bottom()) return true;
  return a.is_bottom() && !b.head.is_bottom();
}

/// Bits needed per field: 4n+3 numbers plus bottom.
constexpr int field_bits(int n) {
  return static_cast<int>(std::bit_width(static_cast<unsigned>(4 * n + 4 - 1)));
}

constexpr int timestamp_bits(int n) { return 2 * field_bits(n); }

/// Least field value in 0..4n+2 that occurs in no tail or head of `scanned`.
/// At most 2 * scanned.size() values are occupied; with the 2n+1 records of
/// a Write's scan this leaves at least one of the 4n+3 values free.
inline Field select_free(std::span<const Timestamp> scanned, int n) {
  std::vector<bool> occupied(static_cast<std::size_t>(max_field(n) + 1), false);
  for (const Timestamp& ts : scanned) {
    for (Field f : {ts.tail, ts.head}) {
      if (!f.is_bottom() && f.value() <= max_field(n)) occupied[static_cast<std::size_t>(f.value())] = true;
    }
  }
  for (int v = 0; v <= max_field(n); ++v) {
    if (!occupied[static_cast<std::size_t>(v)]) return Field::of(v);
  }
  throw std::logic_error("select_free: every field value occupied");
}

}  // namespace wfreg
