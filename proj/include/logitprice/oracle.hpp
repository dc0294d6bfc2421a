#pragma once

// Exhaustive grid search over the price box filtered by the constraints.
// The best grid value is a lower bound on the optimum; the slack G * h * m,
// with G the largest sampled |dR/dp_i| and h the widest grid spacing, is
// reported alongside it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "logitprice/model.hpp"

namespace logitprice {

inline constexpr std::size_t kOracleMaxProducts = 4;
inline constexpr double kOracleFeasibilityTol = 1e-9;

/// No grid point passed the constraints; the feasible set may be thin or empty.
class NoFeasibleGridPoint : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace oracle_detail {

struct Box {
  std::vector<double> lo, hi;
};

struct Best {
  double value = -std::numeric_limits<double>::infinity();
  std::uint64_t index = 0;
  bool found = false;
  double lipschitz = 0.0;
};

inline std::vector<double> point_at(const Box& box, std::uint64_t index, std::size_t points) {
  std::vector<double> p(box.lo.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto k = index % points;
    index /= points;
    p[i] = points == 1 ? box.lo[i] : box.lo[i] + (box.hi[i] - box.lo[i]) * static_cast<double>(k) / static_cast<double>(points - 1);
  }
  return p;
}

inline Best scan(const PricingInstance& inst, const Box& box, std::size_t points, std::uint64_t begin,
                 std::uint64_t end, std::uint64_t gradient_stride) {
  Best best;
  for (std::uint64_t idx = begin; idx < end; ++idx) {
    const auto p = point_at(box, idx, points);
    if (!is_feasible(inst, p, kOracleFeasibilityTol)) continue;
    const double r = revenue(inst, p);
    if (!best.found || r > best.value) {
      best.value = r;
      best.index = idx;
      best.found = true;
    }
    if (idx % gradient_stride == 0) {
      for (double g : revenue_gradient(inst, p)) best.lipschitz = std::max(best.lipschitz, std::abs(g));
    }
  }
  return best;
}

inline Solution grid_over(const PricingInstance& inst, const Box& box, std::size_t points, unsigned workers) {
  if (inst.m > kOracleMaxProducts) throw InvalidInput("grid oracle supports at most 4 products");
  if (points < 2) throw InvalidInput("grid oracle needs at least 2 points per dimension");
  inst.validate();
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < inst.m; ++i) total *= points;
  const std::uint64_t stride = std::max<std::uint64_t>(1, total / 20000);
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::uint64_t>(total, 64))));
  std::vector<Best> parts(workers);
  if (workers == 1) {
    parts[0] = scan(inst, box, points, 0, total, stride);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        parts[w] = scan(inst, box, points, total * w / workers, total * (w + 1) / workers, stride);
      });
    }
    for (auto& th : pool) th.join();
  }
  Best best;
  for (const auto& part : parts) {
    best.lipschitz = std::max(best.lipschitz, part.lipschitz);
    if (part.found && (!best.found || part.value > best.value || (part.value == best.value && part.index < best.index))) {
      best.value = part.value;
      best.index = part.index;
      best.found = true;
    }
  }
  if (!best.found) throw NoFeasibleGridPoint("no grid point satisfies the constraints; the feasible set may have empty interior");
  const auto p = point_at(box, best.index, points);
  for (double g : revenue_gradient(inst, p)) best.lipschitz = std::max(best.lipschitz, std::abs(g));
  double spacing = 0.0;
  for (std::size_t i = 0; i < inst.m; ++i)
    spacing = std::max(spacing, (box.hi[i] - box.lo[i]) / static_cast<double>(points - 1));
  Solution sol;
  sol.prices = p;
  sol.revenue = best.value;
  sol.status = SolveStatus::feasible_heuristic;
  sol.diagnostics["lipschitz"] = best.lipschitz;
  sol.diagnostics["spacing"] = spacing;
  sol.diagnostics["slack"] = best.lipschitz * spacing * static_cast<double>(inst.m);
  sol.diagnostics["grid_points"] = static_cast<double>(total);
  return sol;
}

}  // namespace oracle_detail

/// Best feasible point of a points_per_dim^m grid over [L, U].
inline Solution grid_search(const PricingInstance& inst, std::size_t points_per_dim, unsigned workers = 1) {
  return oracle_detail::grid_over(inst, {inst.L, inst.U}, points_per_dim, workers);
}

/// Regrids [p_i - radius w_i, p_i + radius w_i] intersected with [L_i, U_i], where w_i = U_i - L_i.
/// Returns the better of the incumbent and the new grid optimum. The local grid
/// says nothing about the rest of the box, so the incumbent's slack is kept and
/// the local spacing is logged as refine_spacing.
inline Solution refine(const PricingInstance& inst, const Solution& incumbent, double radius, std::size_t points_per_dim,
                       unsigned workers = 1) {
  if (!(radius >= 0.0)) throw InvalidInput("refine radius must be nonnegative");
  if (incumbent.prices.size() != inst.m) throw InvalidInput("refine: incumbent has the wrong dimension");
  oracle_detail::Box box;
  for (std::size_t i = 0; i < inst.m; ++i) {
    const double w = inst.U[i] - inst.L[i];
    box.lo.push_back(std::max(inst.L[i], incumbent.prices[i] - radius * w));
    box.hi.push_back(std::min(inst.U[i], incumbent.prices[i] + radius * w));
  }
  Solution out = incumbent;
  try {
    auto fresh = oracle_detail::grid_over(inst, box, points_per_dim, workers);
    out.diagnostics["refine_spacing"] = fresh.diagnostics["spacing"];
    if (fresh.revenue > incumbent.revenue) {
      out.prices = fresh.prices;
      out.revenue = fresh.revenue;
    }
  } catch (const NoFeasibleGridPoint&) {
  }
  return out;
}

/// Grid with about total_points points (points_per_dim = floor(total^(1/m))),
/// then `rounds` refinements, each regridding two current spacings around the incumbent.
inline Solution oracle_solve(const PricingInstance& inst, double total_points, int rounds, unsigned workers = 1) {
  if (inst.m > kOracleMaxProducts) throw InvalidInput("grid oracle supports at most 4 products");
  if (!(total_points >= 2.0)) throw InvalidInput("grid oracle needs at least 2 points");
  auto ppd = static_cast<std::size_t>(std::floor(std::pow(total_points, 1.0 / static_cast<double>(inst.m)) + 1e-9));
  ppd = std::max<std::size_t>(ppd, 2);
  auto sol = grid_search(inst, ppd, workers);
  double widest = 0.0;
  for (std::size_t i = 0; i < inst.m; ++i) widest = std::max(widest, inst.U[i] - inst.L[i]);
  double spacing = sol.diagnostics.at("spacing");
  for (int r = 0; r < rounds && widest > 0.0; ++r) {
    sol = refine(inst, sol, 2.0 * spacing / widest, ppd, workers);
    spacing = 4.0 * spacing / static_cast<double>(ppd - 1);
  }
  sol.diagnostics["points_per_dim"] = static_cast<double>(ppd);
  return sol;
}

}  // namespace logitprice
