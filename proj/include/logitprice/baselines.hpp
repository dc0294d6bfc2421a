#pragma once

// Comparison methods: projected-gradient local search, seeded multistart,
// and collapsing a mixture into one average segment.

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "logitprice/model.hpp"
#include "logitprice/polytope.hpp"
#include "logitprice/rng.hpp"

namespace logitprice {

struct LocalSearchConfig {
  std::size_t max_iters = 300;
  double kkt_tol = 1e-6;          // on |p - P(p + grad R(p))|_inf
  std::size_t n_starts = 8;
  std::uint64_t seed = 0;
  double max_move = 0.05;         // largest trial move, as a fraction of the widest box side
  double shrink = 0.5;
  double sufficient_increase = 1e-4;

  void validate() const {
    if (max_iters == 0 || n_starts == 0) throw InvalidInput("local search counts must be positive");
    if (!(kkt_tol > 0.0) || !(max_move > 0.0)) throw InvalidInput("local search tolerances must be positive");
    if (!(shrink > 0.0 && shrink < 1.0)) throw InvalidInput("shrink must lie in (0, 1)");
    if (!(sufficient_increase > 0.0 && sufficient_increase < 1.0))
      throw InvalidInput("sufficient_increase must lie in (0, 1)");
  }
};

namespace baselines_detail {

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline PriceVector step(const PricingInstance& inst, std::span<const double> x, std::span<const double> g, double a) {
  PriceVector y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + a * g[i];
  return project_prices(inst, y);
}

}  // namespace baselines_detail

/// Projected gradient ascent with Armijo backtracking from the projection of start.
inline Solution gradient_local_search(const PricingInstance& inst, std::span<const double> start,
                                      const LocalSearchConfig& config = {}) {
  using namespace baselines_detail;
  config.validate();
  PriceVector x = project_prices(inst, start);
  double rx = revenue(inst, x);
  double width = 0.0;
  for (std::size_t i = 0; i < inst.m; ++i) width = std::max(width, inst.U[i] - inst.L[i]);
  double alpha = -1.0;
  std::size_t iter = 0;
  double pg_norm = 0.0;
  for (; iter < config.max_iters; ++iter) {
    const auto g = revenue_gradient(inst, x);
    const double gmax = max_abs(g);
    if (gmax == 0.0 || width == 0.0) {
      pg_norm = 0.0;
      break;
    }
    const auto unit = step(inst, x, g, 1.0);
    pg_norm = 0.0;
    for (std::size_t i = 0; i < inst.m; ++i) pg_norm = std::max(pg_norm, std::abs(unit[i] - x[i]));
    if (pg_norm <= config.kkt_tol) break;
    const double cap = config.max_move * width / gmax;
    alpha = alpha < 0.0 ? cap : std::min(alpha, cap);
    bool accepted = false;
    for (double a = alpha; a * gmax > 1e-14 * std::max(1.0, width); a *= config.shrink) {
      auto y = step(inst, x, g, a);
      double ascent = 0.0;
      for (std::size_t i = 0; i < inst.m; ++i) ascent += g[i] * (y[i] - x[i]);
      const double ry = revenue(inst, y);
      if (ry >= rx + config.sufficient_increase * ascent && ry >= rx) {
        const bool moved = ry > rx || y != x;
        x = std::move(y);
        rx = ry;
        alpha = a / config.shrink;
        accepted = moved;
        break;
      }
    }
    if (!accepted) break;
  }
  Solution sol;
  sol.prices = std::move(x);
  sol.revenue = rx;
  sol.status = SolveStatus::feasible_heuristic;
  sol.diagnostics["iterations"] = static_cast<double>(iter);
  sol.diagnostics["projected_gradient"] = pg_norm;
  return sol;
}

/// Start k is a uniform draw in [L, U] from stream (seed, k), so smaller n_starts is a prefix.
inline PriceVector multistart_point(const PricingInstance& inst, std::uint64_t seed, std::size_t k) {
  CounterRng rng(stream_key({seed, static_cast<std::uint64_t>(k)}));
  PriceVector p(inst.m);
  for (std::size_t i = 0; i < inst.m; ++i) p[i] = rng.uniform(inst.L[i], inst.U[i]);
  return p;
}

inline Solution multistart(const PricingInstance& inst, const LocalSearchConfig& config = {}) {
  config.validate();
  Solution best;
  std::size_t best_start = 0;
  double iterations = 0.0;
  for (std::size_t k = 0; k < config.n_starts; ++k) {
    auto sol = gradient_local_search(inst, multistart_point(inst, config.seed, k), config);
    iterations += sol.diagnostics["iterations"];
    if (k == 0 || sol.revenue > best.revenue) {
      best = std::move(sol);
      best_start = k;
    }
  }
  best.diagnostics["starts"] = static_cast<double>(config.n_starts);
  best.diagnostics["best_start"] = static_cast<double>(best_start);
  best.diagnostics["total_iterations"] = iterations;
  return best;
}

/// Single segment with a_i = mean_t a_ti (unweighted unless weighted = true, then d-weighted).
inline PricingInstance aggregate_segments(const PricingInstance& inst, bool weighted = false) {
  if (inst.T == 0) throw InvalidInput("aggregate_segments: no segments");
  PricingInstance out = inst;
  out.T = 1;
  out.d = {1.0};
  out.a.assign(inst.m, 0.0);
  for (std::size_t i = 0; i < inst.m; ++i) {
    double total = 0.0;
    for (std::size_t t = 0; t < inst.T; ++t)
      total += (weighted ? inst.d[t] : 1.0 / static_cast<double>(inst.T)) * inst.intercept(t, i);
    out.a[i] = total;
  }
  if (inst.T == 1) out.a = inst.a;
  return out;
}

}  // namespace logitprice
