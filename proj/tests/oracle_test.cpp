#include <gtest/gtest.h>

#include <set>

#include "support.hpp"

using namespace vbscan;
using namespace testing_support;

namespace {

// Expected persistent bits written out from the layout: every bit of a
// variable that nothing rewrites in a cycle.
std::set<std::pair<std::uint32_t, int>> bits_of(std::initializer_list<std::pair<std::uint32_t, int>> single,
                                                std::initializer_list<std::uint32_t> whole_bytes) {
  std::set<std::pair<std::uint32_t, int>> s(single.begin(), single.end());
  for (auto b : whole_bytes) {
    for (int i = 0; i < 8; ++i) s.insert({b, i});
  }
  return s;
}

void expect_persistent_exactly(const ScanReport& r, const std::set<std::pair<std::uint32_t, int>>& expect) {
  for (const auto& b : r.bytes) {
    for (int i = 0; i < 8; ++i) {
      const BitVerdict v = b.bits[static_cast<std::size_t>(i)];
      if (expect.contains({b.offset, i})) {
        EXPECT_EQ(v, BitVerdict::VulnerablePersistent) << "byte " << b.offset << " bit " << i;
      } else {
        EXPECT_EQ(v, BitVerdict::WritableNotRetained) << "byte " << b.offset << " bit " << i;
      }
    }
  }
}

}  // namespace

TEST(Oracle, CtuDefaultsMarksCuRPvCv) {
  expect_persistent_exactly(oracle_program("ctu_defaults"), bits_of({{0, 0}, {0, 1}}, {2, 3, 6, 7}));
}

TEST(Oracle, CtuDirectDemotesPv) {
  const ScanReport r = oracle_program("ctu_direct");
  expect_persistent_exactly(r, bits_of({{0, 0}, {0, 1}}, {6, 7}));
  EXPECT_EQ(r.bytes[2].bits[0], BitVerdict::WritableNotRetained);
}

TEST(Oracle, TpDefaultsAndDirect) {
  expect_persistent_exactly(oracle_program("tp_defaults"), bits_of({{0, 0}}, {2, 3, 4, 5}));
  expect_persistent_exactly(oracle_program("tp_direct"), bits_of({}, {}));
}

TEST(Oracle, AgreesWithScannerOnEveryBundledTarget) {
  int runs = 0;
  for (const auto& t : scan_targets()) {
    const ScanReport s = scan_program(t.program, t.db);
    const ScanReport o = oracle_program(t.program, t.db);
    ASSERT_EQ(s.bytes.size(), o.bytes.size()) << t.program;
    for (std::size_t i = 0; i < s.bytes.size(); ++i) {
      EXPECT_EQ(s.bytes[i].bits, o.bytes[i].bits) << t.program << " DB" << t.db << " byte " << i;
    }
    EXPECT_EQ(s.summary, o.summary) << t.program;
    ++runs;
  }
  EXPECT_GE(runs, 9);
}

TEST(Oracle, AgreesUnderOtherCycleCounts) {
  for (LockstepParams p : {LockstepParams{0, 0, 0}, LockstepParams{0, 3, 1}, LockstepParams{2, 1, 1}}) {
    for (const auto& t : scan_targets()) {
      const ScanReport s = scan_program(t.program, t.db, p);
      const ScanReport o = oracle_program(t.program, t.db, p);
      for (std::size_t i = 0; i < s.bytes.size(); ++i) {
        EXPECT_EQ(s.bytes[i].bits, o.bytes[i].bits) << t.program << " byte " << i << " d=" << p.direct_cycles;
      }
    }
  }
}

TEST(Oracle, LeavesRuntimeUntouched) {
  auto rt = settled(bundled("attack_scenario"));
  const Snapshot before = rt->store().snapshot();
  const auto cycles = rt->cycle_count();
  oracle_scan(*rt, 100, {});
  EXPECT_EQ(rt->store().snapshot(), before);
  EXPECT_EQ(rt->cycle_count(), cycles);
}

TEST(Oracle, RequiresLockstep) {
  Runtime rt(bundled("ctu_defaults"), ClockMode::wallclock(std::chrono::milliseconds(10)));
  EXPECT_THROW(oracle_scan(rt, 100, {}), Error);
}

TEST(Oracle, ProtectedVbNotWritable) {
  Runtime rt(parse_program("program p\nvb 4 size 2 protected\n"));
  const ScanReport r = oracle_scan(rt, 4, {});
  for (const auto& b : r.bytes) {
    for (auto v : b.bits) EXPECT_EQ(v, BitVerdict::NotWritable);
  }
  EXPECT_EQ(r.mode, "oracle");
}
