#include <gtest/gtest.h>

#include "wfreg/memory.hpp"

using namespace wfreg;

TEST(Memory, RejectsBadParameters) {
  EXPECT_THROW(build_memory(0, 4), std::invalid_argument);
  EXPECT_THROW(build_memory(2, 0), std::invalid_argument);
}

TEST(Memory, CellCounts) {
  for (int n : {1, 2, 3, 8}) {
    const Census c = census(build_memory(n, 4, Construction::c1));
    const auto m = static_cast<std::size_t>(n);
    EXPECT_EQ(c.cells, (m + 1) * (m + 1));
    EXPECT_EQ(c.two_record_cells, m);
    EXPECT_EQ(c.records, (m + 1) * (m + 2) - 1);
  }
}

TEST(Memory, ReplicaVariantKeepsValuesWithTheWriter) {
  for (int n : {1, 2, 3, 8}) {
    const Census c = census(build_memory(n, 4, Construction::c2));
    EXPECT_EQ(c.writer_value_fields, 2 * static_cast<std::size_t>(n + 1));
    EXPECT_EQ(c.reader_value_fields, 0u);
  }
  const Census plain = census(build_memory(2, 4, Construction::c1));
  EXPECT_EQ(plain.value_fields(), plain.records);
}

TEST(Memory, MergedCellsHoldTwoRecords) {
  Memory mem(2, 4, Construction::c1);
  EXPECT_EQ(mem.arity(cell(0, 2)), 2u);
  EXPECT_EQ(mem.arity(cell(1, 2)), 2u);
  EXPECT_EQ(mem.arity(cell(2, 2)), 1u);
  EXPECT_EQ(mem.arity(cell(0, 1)), 1u);
}

TEST(Memory, ReadReturnsLastWrite) {
  Memory mem(1, 8, Construction::c1);
  Record r;
  r.value = 5;
  r.ts = {Field::of(0), Field::of(1)};
  mem.write({1}, cell(1, 0), CellContent(r), {3, Line::l4});
  const CellContent got = mem.read({0}, cell(1, 0), {4, Line::l1});
  EXPECT_EQ(got[0].value, 5);
  EXPECT_EQ(got[0].ts, r.ts);
  ASSERT_EQ(mem.log().size(), 2u);
  EXPECT_EQ(mem.log()[0].kind, EventKind::cell_write);
  EXPECT_EQ(mem.log()[1].kind, EventKind::cell_read);
  EXPECT_EQ(mem.log()[1].seq, 1u);
  EXPECT_EQ(mem.log()[1].line, Line::l1);
  EXPECT_EQ(mem.log()[1].op, 4u);
}

TEST(Memory, EnforcesOwnershipAndArity) {
  Memory mem(2, 4, Construction::c1);
  const Record r;
  EXPECT_THROW(mem.read({1}, cell(2, 0), {}), ModelViolation);       // not its reader
  EXPECT_THROW(mem.write({0}, cell(1, 0), CellContent(r), {}), ModelViolation);  // not its owner
  EXPECT_THROW(mem.write({0}, cell(0, 2), CellContent(r), {}), ModelViolation);  // merged cell needs two
  EXPECT_THROW(mem.write({0}, cell(0, 1), CellContent(r, r), {}), ModelViolation);
  EXPECT_THROW(mem.read({0}, cell(3, 0), {}), ModelViolation);
  EXPECT_NO_THROW(mem.write({0}, cell(0, 2), CellContent(r, r), {}));
  EXPECT_NO_THROW(mem.read({2}, cell(0, 2), {}));
}

TEST(Memory, SnapshotRestore) {
  Memory mem(1, 4, Construction::c0);
  const auto snap = mem.snapshot();
  Record r;
  r.tag = 9;
  mem.write({1}, cell(1, 1), CellContent(r), {});
  EXPECT_EQ(mem.peek(cell(1, 1))[0].tag, 9u);
  mem.restore(snap);
  EXPECT_EQ(mem.peek(cell(1, 1))[0].tag, 0u);
  EXPECT_TRUE(mem.log().empty());
}

TEST(Memory, PeekDoesNotLog) {
  Memory mem(1, 4, Construction::c1);
  (void)mem.peek(cell(0, 0));
  EXPECT_TRUE(mem.log().empty());
}
