#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "logitprice/oracle.hpp"
#include "test_oracles.hpp"

using namespace logitprice;

namespace {

PricingInstance single(double L, double U) {
  PricingInstance inst;
  inst.m = 1;
  inst.T = 1;
  inst.a = {0.0};
  inst.b = {1.0};
  inst.d = {1.0};
  inst.L = {L};
  inst.U = {U};
  return inst;
}

PricingInstance capacity_pair() {
  PricingInstance inst;
  inst.m = 2;
  inst.T = 1;
  inst.a = {0.0, 0.0};
  inst.b = {1.0, 1.0};
  inst.d = {1.0};
  inst.L = {0.0, 0.0};
  inst.U = {10.0, 10.0};
  inst.capacity.push_back({{1.0, 1.0}, 2.0});
  return inst;
}

double golden_single() {
  auto f = [](double p) { return testref::mnl_revenue({0.0}, {1.0}, {p}); };
  return testref::golden_section_max(f, 0.0, 10.0);
}

}  // namespace

TEST(Oracle, BoundMaximum) {
  auto sol = grid_search(single(0.0, 1.0), 100000);
  EXPECT_NEAR(sol.prices[0], 1.0, 1e-12);
  EXPECT_NEAR(sol.revenue, 1.0 / (1.0 + std::exp(1.0)), 1e-12);
  EXPECT_EQ(sol.status, SolveStatus::feasible_heuristic);
}

TEST(Oracle, InteriorMaximumMatchesGoldenSection) {
  const double p_star = golden_single();
  const double r_star = testref::mnl_revenue({0.0}, {1.0}, {p_star});
  auto sol = grid_search(single(0.0, 10.0), 1000000);
  EXPECT_NEAR(sol.revenue, 0.278465, 1e-6);
  EXPECT_LE(sol.revenue, r_star + 1e-15);
  EXPECT_GE(sol.revenue + sol.diagnostics.at("slack"), r_star);
  EXPECT_DOUBLE_EQ(sol.diagnostics.at("spacing"), 10.0 / 999999.0);
}

TEST(Oracle, CapacityPairGolden) {
  auto sol = grid_search(capacity_pair(), 2001);
  EXPECT_NEAR(sol.revenue, 0.42388311523417088, 1e-12);
  EXPECT_NEAR(sol.prices[0], 1.0, 1e-12);
  EXPECT_NEAR(sol.prices[0] + sol.prices[1], 2.0, 1e-12);
}

TEST(Oracle, CapacityPairAgainstClosedForm) {
  // With p1 = p2 = 1 the capacity row binds: R = 2e^{-1}/(1 + 2e^{-1}).
  const double expected = 2.0 / (std::exp(1.0) + 2.0);
  auto sol = grid_search(capacity_pair(), 2001);
  EXPECT_NEAR(sol.revenue, expected, 1e-12);
}

TEST(Oracle, RefineRadiusZeroUnchanged) {
  auto inst = single(0.0, 10.0);
  auto sol = grid_search(inst, 1001);
  auto again = refine(inst, sol, 0.0, 11);
  EXPECT_EQ(again.prices, sol.prices);
  EXPECT_EQ(again.revenue, sol.revenue);
}

TEST(Oracle, TwoRefinementRounds) {
  auto inst = single(0.0, 10.0);
  auto sol = grid_search(inst, 101);
  const double start = sol.revenue;
  sol = refine(inst, sol, 0.01, 101);
  EXPECT_GE(sol.revenue, start);
  const double mid = sol.revenue;
  sol = refine(inst, sol, 1e-4, 101);
  EXPECT_GE(sol.revenue, mid);
  EXPECT_NEAR(sol.prices[0], golden_single(), 1e-4);
  EXPECT_NEAR(sol.prices[0], 1.278465, 1e-4);
}

TEST(Oracle, RefineStaysInBox) {
  auto inst = single(0.0, 1.0);
  auto sol = grid_search(inst, 11);
  for (double radius : {0.1, 0.5, 2.0}) {
    auto r = refine(inst, sol, radius, 21);
    EXPECT_GE(r.prices[0], 0.0);
    EXPECT_LE(r.prices[0], 1.0);
    EXPECT_GE(r.revenue, sol.revenue);
  }
}

TEST(Oracle, WorkersAgree) {
  auto inst = capacity_pair();
  inst.a = {0.3, -0.2};
  auto one = grid_search(inst, 301, 1);
  auto four = grid_search(inst, 301, 4);
  EXPECT_EQ(one.prices, four.prices);
  EXPECT_EQ(one.revenue, four.revenue);
  EXPECT_EQ(one.diagnostics.at("slack"), four.diagnostics.at("slack"));
}

TEST(Oracle, SandwichOnRandomSmallInstances) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ua(-2.0, 2.0), ub(0.3, 1.5);
  for (int k = 0; k < 10; ++k) {
    PricingInstance inst;
    inst.m = 2;
    inst.T = 1;
    inst.a = {ua(rng), ua(rng)};
    inst.b = {ub(rng), ub(rng)};
    inst.d = {1.0};
    inst.L = {0.0, 0.0};
    inst.U = {6.0, 6.0};
    auto coarse = grid_search(inst, 101);
    auto fine = grid_search(inst, 801);
    EXPECT_LE(fine.revenue, coarse.revenue + coarse.diagnostics.at("slack") + 1e-12);
    EXPECT_GE(fine.revenue, coarse.revenue - 1e-15);
  }
}

TEST(Oracle, Errors) {
  PricingInstance big;
  big.m = 5;
  big.T = 1;
  big.a.assign(5, 0.0);
  big.b.assign(5, 1.0);
  big.d = {1.0};
  big.L.assign(5, 0.0);
  big.U.assign(5, 1.0);
  EXPECT_THROW(grid_search(big, 2), InvalidInput);
  EXPECT_THROW(grid_search(single(0.0, 1.0), 1), InvalidInput);

  // Feasible set is the single point p1 = p2 = 0.37, missed by the grid.
  auto thin = capacity_pair();
  thin.capacity = {{{1.0, 1.0}, 0.74}};
  thin.pairwise = {{0, 1, 0.0}, {1, 0, 0.0}};
  thin.L = {0.37, 0.0};
  EXPECT_THROW(grid_search(thin, 10), NoFeasibleGridPoint);
}
