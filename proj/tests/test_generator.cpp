#include <cmath>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "logitprice/generator.hpp"
#include "logitprice/instance_io.hpp"
#include "test_oracles.hpp"

using namespace logitprice;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Generator, ByteIdenticalFiles) {
  const std::string a = ::testing::TempDir() + "gen_a.json";
  const std::string b = ::testing::TempDir() + "gen_b.json";
  save_instance(generate_instance(6, 3, ConstraintMode::CP, 42), a);
  save_instance(generate_instance(6, 3, ConstraintMode::CP, 42), b);
  const auto text = slurp(a);
  EXPECT_FALSE(text.empty());
  EXPECT_EQ(text, slurp(b));
  EXPECT_NE(dump_instance(generate_instance(6, 3, ConstraintMode::CP, 43)), text);
  EXPECT_NE(dump_instance(generate_instance(6, 3, ConstraintMode::C, 42)), text);
}

TEST(Generator, RoundTrip) {
  const auto inst = generate_instance(4, 2, ConstraintMode::CP, 5);
  EXPECT_EQ(dump_instance(parse_instance(dump_instance(inst))), dump_instance(inst));
}

TEST(Generator, Ranges) {
  for (auto mode : {ConstraintMode::U, ConstraintMode::C, ConstraintMode::CP}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto inst = generate_instance(7, 3, mode, seed);
      for (double a : inst.a) {
        EXPECT_GE(a, -7.0);
        EXPECT_LE(a, 7.0);
      }
      for (double b : inst.b) {
        EXPECT_GE(b, 0.001);
        EXPECT_LE(b, 0.01);
      }
      double total = 0.0;
      for (double d : inst.d) {
        EXPECT_GT(d, 0.0);
        total += d;
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
      for (std::size_t i = 0; i < inst.m; ++i) {
        double a_max = -INFINITY;
        for (std::size_t t = 0; t < inst.T; ++t) a_max = std::max(a_max, inst.intercept(t, i));
        const double ub = theoretical_price_bound(a_max, inst.b[i]);
        EXPECT_GE(inst.U[i], 0.8 * ub);
        EXPECT_LE(inst.U[i], ub);
        EXPECT_GE(inst.L[i], 0.0);
        EXPECT_LE(inst.L[i], 0.3 * inst.U[i]);
      }
    }
  }
}

TEST(Generator, ModeStructure) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto u = generate_instance(5, 2, ConstraintMode::U, seed);
    EXPECT_TRUE(u.capacity.empty());
    EXPECT_TRUE(u.pairwise.empty());

    const auto c = generate_instance(5, 2, ConstraintMode::C, seed);
    ASSERT_EQ(c.capacity.size(), 5u);
    EXPECT_TRUE(c.pairwise.empty());
    EXPECT_TRUE(is_feasible(c, c.L, 0.0));
    for (const auto& row : c.capacity) {
      double sum = 0.0, sl = 0.0, su = 0.0;
      for (std::size_t i = 0; i < c.m; ++i) {
        EXPECT_GE(row.alpha[i], 0.0);
        sum += row.alpha[i];
        sl += row.alpha[i] * c.L[i];
        su += row.alpha[i] * c.U[i];
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
      EXPECT_GE(row.beta, sl - 1e-12);
      EXPECT_LE(row.beta, 0.5 * su + 1e-12);
    }

    const auto cp = generate_instance(5, 2, ConstraintMode::CP, seed);
    ASSERT_EQ(cp.capacity.size(), 5u);
    for (double b : cp.b) EXPECT_EQ(b, cp.b[0]);
    ASSERT_EQ(cp.pairwise.size(), 2u);
    for (std::size_t k = 0; k < cp.pairwise.size(); ++k) {
      const auto& rule = cp.pairwise[k];
      EXPECT_EQ(rule.i, 2 * k);
      EXPECT_EQ(rule.j, 2 * k + 1);
      EXPECT_GE(rule.r, 0.2 * cp.U[rule.i]);
      EXPECT_LE(rule.r, 0.5 * cp.U[rule.i]);
    }
  }
}

TEST(Generator, TheoreticalBoundIsSingleProductOptimum) {
  for (double a : {-7.0, -1.0, 0.0, 2.5, 7.0}) {
    for (double b : {0.001, 0.004, 0.01}) {
      auto f = [&](double p) { return testref::mnl_revenue({a}, {b}, {p}); };
      const double hi = 20.0 / b;
      const double p_star = testref::golden_section_max(f, 0.0, hi, 1e-10 * hi);
      EXPECT_NEAR(theoretical_price_bound(a, b), p_star, 1e-6 * p_star);
    }
  }
}

TEST(Generator, ResamplesAreLogged) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = generate_instance_logged(6, 2, ConstraintMode::CP, seed);
    EXPECT_GE(g.resamples, 0);
    EXPECT_LE(g.resamples, kMaxResamples);
    EXPECT_NO_THROW(feasible_point(g.instance));
  }
}

TEST(Generator, Errors) {
  EXPECT_THROW(generate_instance(0, 1, ConstraintMode::U, 0), InvalidInput);
  EXPECT_THROW(generate_instance(1, 0, ConstraintMode::U, 0), InvalidInput);
  EXPECT_THROW(parse_mode("X"), InvalidInput);
  EXPECT_EQ(parse_mode("CP"), ConstraintMode::CP);
}
