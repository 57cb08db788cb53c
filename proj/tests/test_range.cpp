#include <hgc/range.hpp>

#include <gtest/gtest.h>

#include "oracle.hpp"

using hgc::CellFault;
using hgc::FaultMap;
using hgc::GroupingConfig;

TEST(StuckOffset, Examples) {
  const GroupingConfig r1c4(4, 1, 4);
  FaultMap none(r1c4);
  none.pos.set(1, 0, CellFault::SA1);
  EXPECT_EQ(hgc::stuck_offset(none, r1c4), 0);

  FaultMap msb(r1c4);
  msb.pos.set(0, 0, CellFault::SA0);
  EXPECT_EQ(hgc::stuck_offset(msb, r1c4), 192);

  FaultMap sym(r1c4);
  sym.pos.set(2, 0, CellFault::SA0);
  sym.neg.set(2, 0, CellFault::SA0);
  EXPECT_EQ(hgc::stuck_offset(sym, r1c4), 0);
}

TEST(RepresentableRange, Examples) {
  const GroupingConfig r1c4(4, 1, 4);
  auto r = hgc::representable_range(FaultMap(r1c4), r1c4);
  EXPECT_EQ(r.min_value, -255);
  EXPECT_EQ(r.max_value, 255);

  FaultMap msb(r1c4);
  msb.pos.set(0, 0, CellFault::SA1);
  r = hgc::representable_range(msb, r1c4);
  EXPECT_EQ(r.min_value, -255);
  EXPECT_EQ(r.max_value, 63);
  EXPECT_EQ(r.ideal_width() - r.width(), 192);
  EXPECT_EQ(r.ideal_width(), 510);
  EXPECT_DOUBLE_EQ(r.reduction(), 192.0 / 510.0);

  const GroupingConfig r2c2(2, 2, 4);
  FaultMap one(r2c2);
  one.pos.set(0, 0, CellFault::SA1);
  r = hgc::representable_range(one, r2c2);
  EXPECT_EQ(r.min_value, -30);
  EXPECT_EQ(r.max_value, 18);
  EXPECT_DOUBLE_EQ(r.reduction(), 12.0 / 60.0);
}

TEST(Trigger, Examples) {
  const GroupingConfig r1c4(4, 1, 4);
  FaultMap f(r1c4);
  f.pos.set(2, 0, CellFault::SA1);
  f.neg.set(2, 0, CellFault::SA0);
  auto rep = hgc::inconsecutivity_trigger(f, r1c4);
  ASSERT_TRUE(rep.triggered);
  ASSERT_EQ(rep.entries.size(), 1u);
  EXPECT_EQ(rep.entries[0].significance, 2);
  EXPECT_EQ(rep.entries[0].gap_stride, 16);
  EXPECT_EQ(rep.entries[0].tail_span, 3);

  EXPECT_FALSE(hgc::inconsecutivity_trigger(FaultMap(r1c4), r1c4).triggered);

  const GroupingConfig r2c2(2, 2, 4);
  FaultMap lsb(r2c2);
  for (int j = 0; j < 2; ++j) {
    lsb.pos.set(1, j, CellFault::SA1);
    lsb.neg.set(1, j, CellFault::SA1);
  }
  rep = hgc::inconsecutivity_trigger(lsb, r2c2);
  ASSERT_TRUE(rep.triggered);
  EXPECT_EQ(rep.entries[0].significance, 1);
  EXPECT_EQ(rep.entries[0].tail_span, 0);
  EXPECT_EQ(rep.entries[0].gap_stride, 4);
  const auto set = hgc::enumerate_representable_set(lsb, r2c2);
  for (std::size_t i = 1; i < set.size(); ++i) EXPECT_EQ(set[i] - set[i - 1], 4);
}

TEST(Trigger, MsbNeverListed) {
  const GroupingConfig r1c2(2, 1, 2);
  for (const auto& f : oracle::all_maps(r1c2)) {
    for (const auto& e : hgc::inconsecutivity_trigger(f, r1c2).entries) EXPECT_LT(e.significance, 2);
  }
}

TEST(Trigger, AllStuckDoesNotFire) {
  // Every position stuck: a single value is representable, which has no gaps.
  const GroupingConfig r1c2(2, 1, 2);
  FaultMap f(r1c2);
  for (int k = 0; k < 2; ++k) {
    f.pos.set(k, 0, CellFault::SA1);
    f.neg.set(k, 0, CellFault::SA1);
  }
  EXPECT_FALSE(hgc::inconsecutivity_trigger(f, r1c2).triggered);
  EXPECT_TRUE(hgc::is_consecutive_exact(f, r1c2));
}

TEST(Enumerate, Examples) {
  const GroupingConfig r1c1(1, 1, 2);
  EXPECT_EQ(hgc::enumerate_representable_set(FaultMap(r1c1), r1c1), (std::vector<hgc::Weight>{-1, 0, 1}));
  FaultMap f(r1c1);
  f.pos.set(0, 0, CellFault::SA1);
  EXPECT_EQ(hgc::enumerate_representable_set(f, r1c1), (std::vector<hgc::Weight>{-1, 0}));

  const GroupingConfig r1c2(2, 1, 2);
  FaultMap lsb(r1c2);
  lsb.pos.set(1, 0, CellFault::SA1);
  lsb.neg.set(1, 0, CellFault::SA1);
  EXPECT_EQ(hgc::enumerate_representable_set(lsb, r1c2), (std::vector<hgc::Weight>{-2, 0, 2}));
  EXPECT_FALSE(hgc::is_consecutive_exact(lsb, r1c2));
}

TEST(Consecutive, Examples) {
  for (const GroupingConfig& config : {GroupingConfig(1, 1, 2), GroupingConfig(4, 1, 4), GroupingConfig(2, 2, 4),
                                       GroupingConfig(4, 2, 4)}) {
    EXPECT_TRUE(hgc::is_consecutive_exact(FaultMap(config), config));
  }
  const GroupingConfig r1c4(4, 1, 4);
  for (CellFault fault : {CellFault::SA0, CellFault::SA1}) {
    FaultMap f(r1c4);
    f.neg.set(0, 0, fault);
    EXPECT_TRUE(hgc::is_consecutive_exact(f, r1c4));
  }
}

TEST(Enumerate, BudgetExceeded) {
  const GroupingConfig r2c4(4, 2, 4);
  EXPECT_NO_THROW(hgc::enumerate_representable_set(FaultMap(r2c4), r2c4));
  EXPECT_THROW(hgc::enumerate_representable_set(FaultMap(r2c4), r2c4, 1000), hgc::BudgetExceeded);
  const GroupingConfig big(12, 1, 4);
  EXPECT_THROW(hgc::is_consecutive_exact(FaultMap(big), big), hgc::BudgetExceeded);
}

// Exhaustive and sampled checks against brute force.

namespace {

void check_against_oracle(const FaultMap& f, const GroupingConfig& config) {
  const auto truth = oracle::enumerate(f, config);
  const auto range = hgc::representable_range(f, config);
  ASSERT_EQ(range.max_value, truth.max());
  ASSERT_EQ(range.min_value, truth.min());

  std::vector<hgc::Weight> expected;
  for (const auto& [v, b] : truth.values) expected.push_back(v);
  ASSERT_EQ(hgc::enumerate_representable_set(f, config), expected);
  ASSERT_EQ(hgc::is_consecutive_exact(f, config), truth.consecutive());

  if (hgc::inconsecutivity_trigger(f, config).triggered) { ASSERT_FALSE(truth.consecutive()); }
  if (f.fault_count() > 0) { ASSERT_LT(range.width(), range.ideal_width()); }
}

}  // namespace

TEST(RangeProperty, ExhaustiveSmallConfigs) {
  for (const GroupingConfig& config : {GroupingConfig(2, 1, 2), GroupingConfig(4, 1, 2), GroupingConfig(2, 2, 2),
                                       GroupingConfig(1, 2, 3), GroupingConfig(3, 1, 2)}) {
    for (const auto& f : oracle::all_maps(config)) check_against_oracle(f, config);
  }
}

TEST(RangeProperty, SampledLargerConfigs) {
  std::mt19937_64 gen(21);
  for (const GroupingConfig& config : {GroupingConfig(4, 1, 4), GroupingConfig(2, 2, 4), GroupingConfig(3, 2, 3)}) {
    for (double p : {0.1, 0.4, 0.8}) {
      for (int t = 0; t < 150; ++t) check_against_oracle(oracle::random_map(config, gen, p), config);
    }
  }
}

TEST(RangeProperty, TriggerNeverFiresOnConsecutiveSets) {
  // Also exercises maps built to be dense in fully stuck positions.
  std::mt19937_64 gen(22);
  const GroupingConfig config(4, 1, 4);
  std::uniform_int_distribution<int> code(1, 2);
  std::bernoulli_distribution stuck_column(0.5);
  std::bernoulli_distribution fault(0.3);
  for (int t = 0; t < 2000; ++t) {
    FaultMap f(config);
    for (int k = 0; k < 4; ++k) {
      const bool all = stuck_column(gen);
      for (auto* side : {&f.pos, &f.neg}) {
        if (all || fault(gen)) side->set(k, 0, static_cast<CellFault>(code(gen)));
      }
    }
    if (hgc::inconsecutivity_trigger(f, config).triggered) { ASSERT_FALSE(hgc::is_consecutive_exact(f, config)); }
  }
}
