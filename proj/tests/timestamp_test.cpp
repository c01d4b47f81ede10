#include <gtest/gtest.h>

#include <random>
#include <set>

#include "wfreg/timestamp.hpp"

using namespace wfreg;

namespace {

Timestamp ts(int t, int h) {
  return {t < 0 ? Field::bottom() : Field::of(t), h < 0 ? Field::bottom() : Field::of(h)};
}

// Every timestamp of the domain for n, bottom included in either field.
std::vector<Timestamp> all_timestamps(int n) {
  std::vector<Timestamp> out;
  for (int t = -1; t <= max_field(n); ++t) {
    for (int h = -1; h <= max_field(n); ++h) out.push_back(ts(t, h));
  }
  return out;
}

}  // namespace

TEST(Domination, Examples) {
  EXPECT_TRUE(dominates(ts(0, 1), ts(1, 2)));
  EXPECT_FALSE(dominates(ts(1, 2), ts(0, 1)));
  EXPECT_TRUE(dominates(ts(-1, -1), ts(3, 4)));
  EXPECT_FALSE(dominates(ts(-1, -1), ts(3, -1)));
  EXPECT_FALSE(dominates(ts(0, 1), ts(1, 0)));  // tail of the lower equals head of the higher
  EXPECT_FALSE(dominates(ts(0, 1), ts(1, -1)));
  EXPECT_FALSE(dominates(ts(2, 5), ts(4, 6)));
}

TEST(Domination, ThreeCycleExists) {
  EXPECT_TRUE(dominates(ts(0, 1), ts(1, 2)));
  EXPECT_TRUE(dominates(ts(1, 2), ts(2, 0)));
  EXPECT_TRUE(dominates(ts(2, 0), ts(0, 1)));
}

TEST(Domination, NoCyclesOfLengthOneOrTwo) {
  for (int n : {1, 2}) {
    const auto all = all_timestamps(n);
    for (const auto& a : all) {
      EXPECT_FALSE(dominates(a, a)) << to_string(a);
      for (const auto& b : all) {
        EXPECT_FALSE(dominates(a, b) && dominates(b, a)) << to_string(a) << " " << to_string(b);
      }
    }
  }
}

TEST(Domination, DominatorHasAHead) {
  const auto all = all_timestamps(2);
  for (const auto& a : all) {
    for (const auto& b : all) {
      if (dominates(a, b)) {
        EXPECT_FALSE(b.head.is_bottom());
      }
    }
  }
}

TEST(Domination, BottomBelowEveryWriterTimestamp) {
  for (int t = -1; t <= 6; ++t) {
    for (int h = 0; h <= 6; ++h) EXPECT_TRUE(dominates(ts(-1, -1), ts(t, h)));
  }
}

TEST(SelectFree, Examples) {
  const int n = 1;
  EXPECT_EQ(select_free({}, n), Field::of(0));
  const std::vector<Timestamp> a{ts(-1, 0)};
  EXPECT_EQ(select_free(a, n), Field::of(1));
  const std::vector<Timestamp> b{ts(0, 1), ts(2, 3)};
  EXPECT_EQ(select_free(b, n), Field::of(4));
  const std::vector<Timestamp> c{ts(1, 2), ts(-1, -1)};
  EXPECT_EQ(select_free(c, n), Field::of(0));
}

TEST(SelectFree, ExhaustedDomainThrows) {
  const int n = 1;  // fields 0..6
  const std::vector<Timestamp> full{ts(0, 1), ts(2, 3), ts(4, 5), ts(6, -1)};
  EXPECT_THROW(select_free(full, n), std::logic_error);
}

TEST(SelectFree, LeastUnoccupiedAgainstOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    std::uniform_int_distribution<int> field(-1, max_field(n));
    std::vector<Timestamp> scanned;
    // The scans a Write performs see at most 2n+1 records.
    const int count = static_cast<int>(rng() % static_cast<unsigned>(2 * n + 2));
    std::set<int> used;
    for (int k = 0; k < count; ++k) {
      scanned.push_back(ts(field(rng), field(rng)));
      if (!scanned.back().tail.is_bottom()) used.insert(scanned.back().tail.value());
      if (!scanned.back().head.is_bottom()) used.insert(scanned.back().head.value());
    }
    int expect = 0;
    while (used.count(expect)) ++expect;
    EXPECT_EQ(select_free(scanned, n), Field::of(expect));
  }
}

TEST(Encoding, BitsPerRecord) {
  // 4n+3 numbers plus bottom, two fields per record.
  EXPECT_EQ(timestamp_bits(1), 6);
  EXPECT_EQ(timestamp_bits(2), 8);
  EXPECT_EQ(timestamp_bits(3), 8);
  EXPECT_EQ(timestamp_bits(8), 12);
  for (int n = 1; n <= 60; ++n) {
    EXPECT_GE(1 << field_bits(n), 4 * n + 4);
    EXPECT_LT(1 << (field_bits(n) - 1), 4 * n + 4);
  }
}

TEST(Encoding, FieldDomain) {
  EXPECT_TRUE(in_domain(ts(-1, 14), 3));
  EXPECT_FALSE(in_domain(ts(15, 0), 3));
  EXPECT_TRUE(field_in_domain(Field::bottom(), 1));
}
