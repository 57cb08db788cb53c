#include <hgc/ilp.hpp>

#include <gtest/gtest.h>

#include <random>

#include "oracle.hpp"

using hgc::CellFault;
using hgc::FaultMap;
using hgc::GroupingConfig;
using hgc::IlpModel;
using hgc::IlpStatus;

TEST(IlpSolve, Examples) {
  IlpModel a;
  a.variables = {{0, 3}};
  a.objective = {1};
  a.equalities = {{{1}, 2}};
  auto s = hgc::solve(a);
  ASSERT_EQ(s.status, IlpStatus::Optimal);
  EXPECT_EQ(s.assignment, (std::vector<std::int64_t>{2}));
  EXPECT_EQ(s.objective_value, 2);

  IlpModel b;
  b.variables = {{0, 3}, {0, 3}};
  b.objective = {1, 1};
  b.equalities = {{{4, 1}, 5}};
  s = hgc::solve(b);
  ASSERT_EQ(s.status, IlpStatus::Optimal);
  EXPECT_EQ(s.assignment, (std::vector<std::int64_t>{1, 1}));
  EXPECT_EQ(s.objective_value, 2);

  IlpModel c;
  c.variables = {{0, 3}};
  c.objective = {1};
  c.equalities = {{{1}, 5}};
  EXPECT_EQ(hgc::solve(c).status, IlpStatus::Infeasible);
}

TEST(IlpSolve, MalformedAndCap) {
  IlpModel m;
  m.variables = {{0, 3}, {0, 1}};
  m.objective = {1};
  EXPECT_THROW(hgc::solve(m), hgc::MalformedModel);
  m.objective = {1, 1};
  m.equalities = {{{1}, 0}};
  EXPECT_THROW(hgc::solve(m), hgc::MalformedModel);
  m.equalities.clear();
  m.variables[1] = {2, 1};
  EXPECT_THROW(hgc::solve(m), hgc::MalformedModel);

  IlpModel big;
  big.variables.assign(70, {0, 1});
  big.objective.assign(70, 1);
  EXPECT_THROW(hgc::solve(big), hgc::SolverCapExceeded);
  hgc::IlpOptions wide;
  wide.variable_cap = 80;
  EXPECT_EQ(hgc::solve(big, wide).objective_value, 0);
}

namespace {

struct Brute {
  bool feasible = false;
  std::int64_t primary = 0;
  std::int64_t secondary = 0;
  std::vector<std::int64_t> x;
};

std::int64_t dot(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& x) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * x[i];
  return s;
}

// Lexicographic odometer over the box: the first optimum met is lex-first.
Brute brute_force(const IlpModel& m) {
  Brute out;
  const std::size_t n = m.variables.size();
  std::vector<std::int64_t> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = m.variables[i].lower;
  for (;;) {
    bool ok = true;
    for (const auto& r : m.equalities) ok = ok && dot(r.coeffs, x) == r.rhs;
    for (const auto& r : m.inequalities) ok = ok && dot(r.coeffs, x) <= r.rhs;
    if (ok) {
      const std::int64_t p = dot(m.objective, x);
      const std::int64_t s = m.secondary_objective.empty() ? 0 : dot(m.secondary_objective, x);
      if (!out.feasible || p < out.primary || (p == out.primary && s < out.secondary)) out = {true, p, s, x};
    }
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (x[i] < m.variables[i].upper) {
        ++x[i];
        break;
      }
      x[i] = m.variables[i].lower;
      if (i == 0) return out;
    }
    if (n == 0) return out;
  }
}

IlpModel random_model(std::mt19937_64& gen) {
  std::uniform_int_distribution<int> nvar(1, 6);
  std::uniform_int_distribution<int> lower(-2, 1);
  std::uniform_int_distribution<int> span(0, 3);
  std::uniform_int_distribution<int> coef(-5, 5);
  std::uniform_int_distribution<int> obj(-3, 3);
  std::uniform_int_distribution<int> nrow(0, 2);
  std::bernoulli_distribution has_secondary(0.5);
  IlpModel m;
  const int n = nvar(gen);
  for (int i = 0; i < n; ++i) {
    const int lo = lower(gen);
    m.variables.push_back({lo, lo + span(gen)});
    m.objective.push_back(obj(gen));
  }
  if (has_secondary(gen)) {
    for (int i = 0; i < n; ++i) m.secondary_objective.push_back(obj(gen));
  }
  for (auto* rows : {&m.equalities, &m.inequalities}) {
    const int k = nrow(gen);
    for (int r = 0; r < k; ++r) {
      hgc::LinearRow row;
      for (int i = 0; i < n; ++i) row.coeffs.push_back(coef(gen));
      row.rhs = coef(gen) * 2;
      rows->push_back(std::move(row));
    }
  }
  return m;
}

}  // namespace

class IlpRandom : public ::testing::TestWithParam<bool> {};

TEST_P(IlpRandom, MatchesBruteForce) {
  hgc::IlpOptions options;
  options.use_dp = GetParam();
  std::mt19937_64 gen(GetParam() ? 41 : 42);
  int feasible = 0;
  for (int t = 0; t < 4000; ++t) {
    const IlpModel m = random_model(gen);
    const auto got = hgc::solve(m, options);
    const auto want = brute_force(m);
    ASSERT_EQ(got.status == IlpStatus::Optimal, want.feasible) << "trial " << t;
    if (!want.feasible) continue;
    ++feasible;
    ASSERT_EQ(got.objective_value, want.primary) << "trial " << t;
    ASSERT_EQ(got.secondary_value, want.secondary) << "trial " << t;
    ASSERT_EQ(got.assignment, want.x) << "trial " << t;
  }
  EXPECT_GT(feasible, 1000);
}

INSTANTIATE_TEST_SUITE_P(DpOnOff, IlpRandom, ::testing::Bool());

TEST(IlpSolve, Deterministic) {
  std::mt19937_64 gen(43);
  for (int t = 0; t < 200; ++t) {
    const IlpModel m = random_model(gen);
    const auto a = hgc::solve(m);
    const auto b = hgc::solve(m);
    ASSERT_EQ(a.assignment, b.assignment);
    ASSERT_EQ(a.nodes, b.nodes);
  }
}

// Per-weight models.

TEST(FawdModel, Examples) {
  const GroupingConfig r1c1(1, 1, 2);
  const auto m = hgc::build_fawd_model(1, FaultMap(r1c1), r1c1);
  ASSERT_EQ(m.equalities.size(), 1u);
  EXPECT_EQ(m.equalities[0].coeffs, (std::vector<std::int64_t>{1, -1}));
  EXPECT_EQ(m.equalities[0].rhs, 1);
  EXPECT_EQ(m.objective, (std::vector<std::int64_t>{1, 1}));
  const auto s = hgc::solve(m);
  EXPECT_EQ(s.assignment, (std::vector<std::int64_t>{1, 0}));
  EXPECT_EQ(s.objective_value, 1);

  const GroupingConfig r1c2(2, 1, 2);
  FaultMap f(r1c2);
  f.pos.set(1, 0, CellFault::SA1);
  const auto cw = hgc::fawd_ilp(1, f, r1c2);
  ASSERT_TRUE(cw);
  EXPECT_EQ(cw->pos, hgc::Bitmap(r1c2, {1, 0}));
  EXPECT_EQ(cw->neg, hgc::Bitmap(r1c2, {0, 1}));
  EXPECT_EQ(cw->cell_sum(), 2);
  EXPECT_EQ(cw->residual, 0);
  EXPECT_EQ(cw->path, hgc::SolvePath::IlpFawd);
}

TEST(FawdModel, FaultAwareDecompositionRestoresWeight) {
  // pos LSB stuck at 0 and neg middle stuck at L-1: the naive write of 19
  // lands at 16 - 12 = 4, while a decomposition through both sides hits 19.
  const GroupingConfig r1c3(3, 1, 4);
  FaultMap f(r1c3);
  f.pos.set(2, 0, CellFault::SA1);
  f.neg.set(1, 0, CellFault::SA0);
  const auto [p, n] = hgc::naive_encode(19, r1c3);
  EXPECT_EQ(hgc::realized_weight(p, n, f, r1c3), 4);
  const auto cw = hgc::fawd_ilp(19, f, r1c3);
  ASSERT_TRUE(cw);
  EXPECT_EQ(cw->realized, 19);
  EXPECT_EQ(hgc::realized_weight(cw->pos, cw->neg, f, r1c3), 19);
}

TEST(FawdModel, IdealMaxFillsPositiveSide) {
  const GroupingConfig r2c2(2, 2, 4);
  const auto cw = hgc::fawd_ilp(30, FaultMap(r2c2), r2c2);
  ASSERT_TRUE(cw);
  EXPECT_EQ(cw->pos, hgc::Bitmap(r2c2, {3, 3, 3, 3}));
  EXPECT_EQ(cw->neg, hgc::Bitmap(r2c2));
}

TEST(FawdModel, InfeasibleWhenUnrepresentable) {
  const GroupingConfig r1c2(2, 1, 2);
  FaultMap f(r1c2);
  f.pos.set(1, 0, CellFault::SA1);
  f.neg.set(1, 0, CellFault::SA1);
  EXPECT_FALSE(hgc::fawd_ilp(1, f, r1c2));
  EXPECT_FALSE(hgc::fawd_ilp(3, f, r1c2));
}

TEST(CvmModel, Examples) {
  const GroupingConfig r1c4(4, 1, 4);
  auto cw = hgc::cvm_ilp(0, FaultMap(r1c4), r1c4);
  EXPECT_EQ(cw.residual, 0);
  EXPECT_EQ(cw.cell_sum(), 0);

  const GroupingConfig r1c1(1, 1, 2);
  FaultMap stuck(r1c1);
  stuck.pos.set(0, 0, CellFault::SA1);
  stuck.neg.set(0, 0, CellFault::SA1);
  cw = hgc::cvm_ilp(5, stuck, r1c1);
  EXPECT_EQ(cw.realized, 0);
  EXPECT_EQ(cw.residual, 5);

  FaultMap msb(r1c4);
  msb.pos.set(0, 0, CellFault::SA1);
  const auto model = hgc::build_cvm_model(100, msb, r1c4);
  const auto s = hgc::solve(model);
  ASSERT_EQ(s.status, IlpStatus::Optimal);
  EXPECT_EQ(s.assignment[0], 37);
  cw = hgc::cvm_ilp(100, msb, r1c4);
  EXPECT_EQ(cw.realized, 63);
  EXPECT_EQ(cw.residual, 37);
  EXPECT_EQ(cw.path, hgc::SolvePath::IlpCvm);
}

TEST(CvmModel, TieBreak) {
  // Set {-2, 0, 2}; w = 1 is equidistant from 0 and 2, and 0 needs no cells.
  const GroupingConfig r1c2(2, 1, 2);
  FaultMap f(r1c2);
  f.pos.set(1, 0, CellFault::SA1);
  f.neg.set(1, 0, CellFault::SA1);
  const auto cw = hgc::cvm_ilp(1, f, r1c2);
  EXPECT_EQ(cw.realized, 0);
  EXPECT_EQ(cw.residual, 1);
  EXPECT_EQ(cw.cell_sum(), 0);
}

TEST(IlpProperty, PerWeightOptimality) {
  std::mt19937_64 gen(44);
  for (const GroupingConfig& config : {GroupingConfig(2, 1, 2), GroupingConfig(4, 1, 2), GroupingConfig(2, 2, 2),
                                       GroupingConfig(2, 1, 4), GroupingConfig(4, 1, 4), GroupingConfig(2, 2, 4)}) {
    std::uniform_int_distribution<hgc::Weight> weight(-config.ideal_max() - 3, config.ideal_max() + 3);
    for (int t = 0; t < 150; ++t) {
      const FaultMap f = oracle::random_map(config, gen, 0.3);
      const auto truth = oracle::enumerate(f, config);
      for (int q = 0; q < 4; ++q) {
        const hgc::Weight w = weight(gen);
        const auto fawd = hgc::fawd_ilp(w, f, config);
        const auto it = truth.values.find(w);
        ASSERT_EQ(fawd.has_value(), it != truth.values.end());
        if (fawd) {
          ASSERT_EQ(fawd->realized, w);
          ASSERT_EQ(fawd->cell_sum(), it->second.cell_sum);
          ASSERT_EQ(std::vector<hgc::CellValue>(fawd->pos.flat().begin(), fawd->pos.flat().end()), it->second.pos);
          ASSERT_EQ(std::vector<hgc::CellValue>(fawd->neg.flat().begin(), fawd->neg.flat().end()), it->second.neg);
        }
        const auto cvm = hgc::cvm_ilp(w, f, config);
        const hgc::Weight d = truth.min_distance(w);
        ASSERT_EQ(cvm.residual < 0 ? -cvm.residual : cvm.residual, d);
        ASSERT_EQ(cvm.cell_sum(), truth.min_sum_at(w, d));
        ASSERT_EQ(hgc::realized_weight(cvm.pos, cvm.neg, f, config), cvm.realized);
      }
    }
  }
}
