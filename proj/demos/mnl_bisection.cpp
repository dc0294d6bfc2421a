// Two products under one logit segment with a joint price cap p0 + p1 <= 3.
// Bisection on the revenue level, then a grid check.

#include <cstdio>

#include "logitprice/logitprice.hpp"

using namespace logitprice;

int main() {
  PricingInstance inst;
  inst.m = 2;
  inst.T = 1;
  inst.a = {1.0, 0.5};
  inst.b = {0.8, 0.6};
  inst.d = {1.0};
  inst.L = {0.0, 0.0};
  inst.U = {10.0, 10.0};
  inst.capacity.push_back({{1.0, 1.0}, 3.0});

  auto run = bisection_run(inst, 1e-6);
  const auto& sol = run.solution;
  std::printf("bisection: revenue %.8f at p = (%.6f, %.6f), %zu steps\n", sol.revenue, sol.prices[0], sol.prices[1],
              run.steps.size());
  for (const auto& step : run.steps)
    std::printf("  theta %.8f  phi %+.3e  [%.8f, %.8f]\n", step.theta, step.phi, step.theta_min, step.theta_max);

  auto grid = grid_search(inst, 1001);
  grid = refine(inst, grid, 0.002, 201);
  std::printf("grid:      revenue %.8f at p = (%.6f, %.6f), slack %.2e\n", grid.revenue, grid.prices[0],
              grid.prices[1], grid.diagnostics.at("slack"));
  return 0;
}
