#include <hgc/ilp.hpp>
#include <hgc/range.hpp>
#include <hgc/table.hpp>

#include <gtest/gtest.h>

#include <random>
#include <set>
#include <thread>

#include "oracle.hpp"

using hgc::CellFault;
using hgc::FaultMap;
using hgc::GroupingConfig;

TEST(AchievableValues, Examples) {
  const GroupingConfig r1c2(2, 1, 2);
  const auto side = hgc::achievable_values(FaultMap(r1c2).pos, r1c2);
  ASSERT_EQ(side.size(), 4u);
  const std::vector<std::int64_t> sums = {0, 1, 1, 2};
  for (int v = 0; v < 4; ++v) {
    ASSERT_NE(side.find(v), nullptr);
    EXPECT_EQ(side.find(v)->cell_sum, sums[static_cast<std::size_t>(v)]);
    EXPECT_EQ(side.find(v)->witness.cell_sum(), sums[static_cast<std::size_t>(v)]);
  }

  FaultMap all(r1c2);
  all.pos.set(0, 0, CellFault::SA1);
  all.pos.set(1, 0, CellFault::SA1);
  const auto zero = hgc::achievable_values(all.pos, r1c2);
  ASSERT_EQ(zero.size(), 1u);
  EXPECT_EQ(zero.entries()[0].value, 0);

  const GroupingConfig r1c1(1, 1, 4);
  FaultMap sa0(r1c1);
  sa0.pos.set(0, 0, CellFault::SA0);
  const auto three = hgc::achievable_values(sa0.pos, r1c1);
  ASSERT_EQ(three.size(), 1u);
  EXPECT_EQ(three.entries()[0].value, 3);
  EXPECT_EQ(three.entries()[0].witness, hgc::Bitmap(r1c1));
}

TEST(AchievableValues, Budget) {
  const GroupingConfig r2c4(4, 2, 4);
  EXPECT_EQ(hgc::side_assignment_count(r2c4), 65536);
  EXPECT_NO_THROW(hgc::achievable_values(FaultMap(r2c4).pos, r2c4));
  EXPECT_THROW(hgc::achievable_values(FaultMap(r2c4).pos, r2c4, 4096), hgc::BudgetExceeded);
}

TEST(TableLookup, Examples) {
  // Five binary cells, fault-free, w = 19: pos 19 / neg 0 is picked over
  // pos 20 / neg 1. Both use three cells; the bitmap order decides.
  const GroupingConfig r1c5(5, 1, 2);
  const auto table = hgc::build_table(FaultMap(r1c5), r1c5);
  auto cw = hgc::fawd_table_lookup(19, table);
  ASSERT_TRUE(cw);
  EXPECT_EQ(hgc::decode(cw->pos, r1c5), 19);
  EXPECT_EQ(hgc::decode(cw->neg, r1c5), 0);
  EXPECT_EQ(cw->cell_sum(), 3);
  EXPECT_EQ(cw->path, hgc::SolvePath::TableFawd);
  EXPECT_EQ(hgc::decode(hgc::fawd_ilp(19, FaultMap(r1c5), r1c5)->pos, r1c5), 19);
  EXPECT_FALSE(hgc::fawd_table_lookup(32, table));

  // With L = 3 the same pair is strictly sparser: 19 = 201 vs 20 = 202 plus 1.
  const GroupingConfig r1c3(3, 1, 3);
  cw = hgc::fawd_table_lookup(19, hgc::build_table(FaultMap(r1c3), r1c3));
  ASSERT_TRUE(cw);
  EXPECT_EQ(hgc::decode(cw->pos, r1c3), 19);
  EXPECT_EQ(cw->cell_sum(), 3);

  const GroupingConfig r1c2(2, 1, 2);
  FaultMap f(r1c2);
  f.pos.set(1, 0, CellFault::SA1);
  cw = hgc::fawd_table_lookup(1, hgc::build_table(f, r1c2));
  ASSERT_TRUE(cw);
  EXPECT_EQ(hgc::decode(cw->pos, r1c2), 2);
  EXPECT_EQ(hgc::decode(cw->neg, r1c2), 1);
  EXPECT_EQ(cw->cell_sum(), 2);
}

TEST(TableLookup, CvmExamples) {
  const GroupingConfig r1c2(2, 1, 2);
  FaultMap f(r1c2);
  f.pos.set(1, 0, CellFault::SA1);
  f.neg.set(1, 0, CellFault::SA1);
  const auto table = hgc::build_table(f, r1c2);
  auto cw = hgc::cvm_table_lookup(1, table);
  EXPECT_EQ(cw.residual, 1);
  EXPECT_EQ(cw.realized, 0);  // sparser than 2
  EXPECT_EQ(cw.path, hgc::SolvePath::TableCvm);

  EXPECT_EQ(hgc::cvm_table_lookup(2, table).residual, 0);

  const GroupingConfig r1c4(4, 1, 4);
  FaultMap msb(r1c4);
  msb.pos.set(0, 0, CellFault::SA1);
  cw = hgc::cvm_table_lookup(63 + 10, hgc::build_table(msb, r1c4));
  EXPECT_EQ(cw.realized, 63);
}

namespace {

std::vector<hgc::CellValue> flat(const hgc::Bitmap& b) { return {b.flat().begin(), b.flat().end()}; }

}  // namespace

TEST(TableProperty, KeySetAndMinimality) {
  std::mt19937_64 gen(51);
  for (const GroupingConfig& config : {GroupingConfig(2, 1, 2), GroupingConfig(4, 1, 2), GroupingConfig(2, 2, 2),
                                       GroupingConfig(4, 1, 4), GroupingConfig(2, 2, 4), GroupingConfig(3, 2, 3)}) {
    for (int t = 0; t < 60; ++t) {
      const FaultMap f = oracle::random_map(config, gen, 0.35);
      const auto table = hgc::build_table(f, config);
      std::set<hgc::Weight> diffs;
      for (const auto& a : table.pos->entries()) {
        for (const auto& b : table.neg->entries()) diffs.insert(a.value - b.value);
      }
      const auto set = hgc::enumerate_representable_set(f, config);
      ASSERT_EQ(std::vector<hgc::Weight>(diffs.begin(), diffs.end()), set);

      // Side minimality: the pos side alone is the oracle with every neg cell stuck at 0.
      FaultMap pos_only = f;
      for (int k = 0; k < config.columns(); ++k)
        for (int j = 0; j < config.rows(); ++j) pos_only.neg.set(k, j, CellFault::SA1);
      const auto truth = oracle::enumerate(pos_only, config);
      ASSERT_EQ(table.pos->size(), truth.values.size());
      for (const auto& e : table.pos->entries()) {
        const auto it = truth.values.find(e.value);
        ASSERT_NE(it, truth.values.end());
        ASSERT_EQ(e.cell_sum, it->second.cell_sum);
        ASSERT_EQ(flat(e.witness), it->second.pos);
        ASSERT_EQ(hgc::decode(hgc::inject_faults(e.witness, f.pos, config), config), e.value);
      }
    }
  }
}

TEST(TableProperty, AgreesWithIlpBitExactly) {
  std::mt19937_64 gen(52);
  for (const GroupingConfig& config : {GroupingConfig(2, 1, 2), GroupingConfig(4, 1, 4), GroupingConfig(2, 2, 4)}) {
    std::uniform_int_distribution<hgc::Weight> weight(-config.ideal_max() - 2, config.ideal_max() + 2);
    for (int t = 0; t < 300; ++t) {
      const FaultMap f = oracle::random_map(config, gen, 0.25);
      const auto table = hgc::build_table(f, config);
      for (int q = 0; q < 3; ++q) {
        const hgc::Weight w = weight(gen);
        const auto a = hgc::fawd_table_lookup(w, table);
        const auto b = hgc::fawd_ilp(w, f, config);
        ASSERT_EQ(a.has_value(), b.has_value());
        if (a) {
          ASSERT_EQ(a->pos, b->pos);
          ASSERT_EQ(a->neg, b->neg);
        }
        const auto c = hgc::cvm_table_lookup(w, table);
        const auto d = hgc::cvm_ilp(w, f, config);
        ASSERT_EQ(c.residual, d.residual);
        ASSERT_EQ(c.pos, d.pos);
        ASSERT_EQ(c.neg, d.neg);
      }
    }
  }
}

TEST(TableCache, BuildsOncePerSide) {
  const GroupingConfig config(2, 2, 4);
  hgc::TableCache cache;
  FaultMap f(config);
  const auto t1 = cache.table(f, config);
  EXPECT_EQ(cache.builds(), 1u);  // both sides fault-free share one entry
  EXPECT_EQ(t1.pos, t1.neg);
  f.neg.set(0, 0, CellFault::SA1);
  cache.table(f, config);
  EXPECT_EQ(cache.builds(), 2u);
  cache.table(f, config);
  EXPECT_EQ(cache.builds(), 2u);
}

TEST(TableCache, ConcurrentBuildOnce) {
  const GroupingConfig config(2, 2, 4);
  hgc::TableCache cache;
  std::vector<std::shared_ptr<const hgc::AchievableSide>> seen(16);
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < seen.size(); ++t) {
      pool.emplace_back([&, t] {
        FaultMap f(config);
        f.pos.set(1, static_cast<int>(t % 2), CellFault::SA0);
        for (int i = 0; i < 200; ++i) seen[t] = cache.side(f.pos, config);
      });
    }
  }
  EXPECT_EQ(cache.builds(), 2u);
  for (std::size_t t = 2; t < seen.size(); ++t) EXPECT_EQ(seen[t], seen[t % 2]);
}
