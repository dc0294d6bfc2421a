#pragma once

// The feasible price set P = {L <= p <= U, capacity rows, pairwise rules} as a
// convex program, with a feasible-point finder and Euclidean projection.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "logitprice/convex.hpp"
#include "logitprice/model.hpp"

namespace logitprice {

namespace polytope_detail {

/// Linear inequality g.p <= h over prices, box sides included.
struct Halfspace {
  std::vector<double> g;
  double h;
};

inline std::vector<Halfspace> halfspaces(const PricingInstance& inst) {
  std::vector<Halfspace> out;
  for (std::size_t i = 0; i < inst.m; ++i) {
    std::vector<double> g(inst.m, 0.0);
    g[i] = 1.0;
    out.push_back({g, inst.U[i]});
    g[i] = -1.0;
    out.push_back({g, -inst.L[i]});
  }
  for (const auto& row : inst.capacity) out.push_back({row.alpha, row.beta});
  for (const auto& rule : inst.pairwise) {
    std::vector<double> g(inst.m, 0.0);
    g[rule.i] += 1.0;
    g[rule.j] -= 1.0;
    out.push_back({g, rule.r});
  }
  return out;
}

inline double price_scale(const PricingInstance& inst) {
  double scale = 1.0;
  for (double u : inst.U) scale = std::max(scale, std::abs(u));
  return scale;
}

}  // namespace polytope_detail

/// Price variables 0..m-1 with their box and every coupling row.
inline convex::ConvexProgram price_program(const PricingInstance& inst) {
  convex::ConvexProgram prog;
  for (std::size_t i = 0; i < inst.m; ++i) prog.add_variable("p" + std::to_string(i), inst.L[i], inst.U[i]);
  for (const auto& row : inst.capacity) {
    std::vector<convex::Term> terms;
    for (std::size_t i = 0; i < inst.m; ++i)
      if (row.alpha[i] != 0.0) terms.push_back({i, row.alpha[i]});
    prog.add_linear(std::move(terms), row.beta);
  }
  for (const auto& rule : inst.pairwise) {
    if (rule.i == rule.j) {
      prog.add_linear({}, rule.r);
      continue;
    }
    prog.add_linear({{rule.i, 1.0}, {rule.j, -1.0}}, rule.r);
  }
  return prog;
}

/// Clips p into [L, U].
inline PriceVector clip_to_box(const PricingInstance& inst, std::span<const double> p) {
  PriceVector out(p.begin(), p.end());
  for (std::size_t i = 0; i < inst.m; ++i) out[i] = std::clamp(out[i], inst.L[i], inst.U[i]);
  return out;
}

/// A point of P; throws Infeasible when P is empty.
inline PriceVector feasible_point(const PricingInstance& inst) {
  if (is_feasible(inst, inst.L, 0.0)) return inst.L;
  auto prog = price_program(inst);
  const double tol = 1e-9 * polytope_detail::price_scale(inst);
  auto res = convex::phase_one(prog, tol);
  if (!res.feasible) throw Infeasible("price polytope is empty");
  return clip_to_box(inst, res.point);
}

namespace polytope_detail {

/// Exact projection onto the affine set of the given active halfspaces, or
/// false when the result is infeasible or has a wrong-signed multiplier.
inline bool active_set_projection(const std::vector<Halfspace>& hs, const std::vector<std::size_t>& active,
                                  std::span<const double> p0, double tol, PriceVector& out) {
  const auto m = static_cast<Eigen::Index>(p0.size());
  const auto k = static_cast<Eigen::Index>(active.size());
  Eigen::Map<const Eigen::VectorXd> x0(p0.data(), m);
  Eigen::VectorXd p = x0;
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(k);
  if (k > 0) {
    Eigen::MatrixXd A(k, m);
    Eigen::VectorXd h(k);
    for (Eigen::Index r = 0; r < k; ++r) {
      A.row(r) = Eigen::Map<const Eigen::VectorXd>(hs[active[r]].g.data(), m).transpose();
      h[r] = hs[active[r]].h;
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A * A.transpose());
    lambda = cod.solve(A * x0 - h);
    p = x0 - A.transpose() * lambda;
    if (!p.allFinite()) return false;
    if ((A * p - h).cwiseAbs().maxCoeff() > tol) return false;
  }
  for (Eigen::Index r = 0; r < k; ++r)
    if (lambda[r] < -tol) return false;
  for (const auto& half : hs) {
    double lhs = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) lhs += half.g[i] * p[i];
    if (lhs - half.h > tol) return false;
  }
  out.assign(p.data(), p.data() + m);
  return true;
}

}  // namespace polytope_detail

/// Euclidean projection of p0 onto P.
inline PriceVector project_prices(const PricingInstance& inst, std::span<const double> p0) {
  using namespace polytope_detail;
  if (p0.size() != inst.m) throw InvalidInput("project_prices: wrong dimension");
  for (double x : p0)
    if (!std::isfinite(x)) throw InvalidInput("project_prices: non-finite price");
  if (is_feasible(inst, p0, kDefaultFeasibilityTol)) return PriceVector(p0.begin(), p0.end());
  PriceVector clipped = clip_to_box(inst, p0);
  if (is_feasible(inst, clipped, 0.0)) return clipped;

  const double scale = price_scale(inst);
  auto prog = price_program(inst);
  double shift = 0.0;
  for (std::size_t i = 0; i < inst.m; ++i) {
    // maximize -(p - p0)^2 / scale, expanded.
    prog.set_quadratic_objective(i, 1.0 / scale);
    prog.set_linear_objective(i, 2.0 * p0[i] / scale);
    shift -= p0[i] * p0[i] / scale;
  }
  prog.set_objective_offset(shift);
  auto out = convex::solve(prog, 1e-12 * scale);
  if (out.status == convex::Status::infeasible) throw Infeasible("price polytope is empty");
  if (out.point.empty()) throw NumericFailure("projection failed: " + std::string(convex::to_string(out.status)));

  // Identify the active set at the barrier point and re-solve it exactly.
  const auto hs = halfspaces(inst);
  std::vector<std::pair<double, std::size_t>> slack;
  for (std::size_t r = 0; r < hs.size(); ++r) {
    double lhs = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < inst.m; ++i) {
      lhs += hs[r].g[i] * out.point[i];
      norm += hs[r].g[i] * hs[r].g[i];
    }
    if (norm == 0.0) continue;
    slack.emplace_back((hs[r].h - lhs) / std::sqrt(norm), r);
  }
  std::sort(slack.begin(), slack.end());
  const double tol = 1e-10 * scale;
  for (double threshold : {1e-7, 1e-6, 1e-5, 1e-4}) {
    std::vector<std::size_t> active;
    for (const auto& [s, r] : slack)
      if (s <= threshold * scale) active.push_back(r);
    PriceVector exact;
    if (active_set_projection(hs, active, p0, tol, exact)) return clip_to_box(inst, exact);
  }
  PriceVector fallback = clip_to_box(inst, std::span<const double>(out.point.data(), inst.m));
  if (!is_feasible(inst, fallback, 1e-6)) throw NumericFailure("projection did not reach the polytope");
  return fallback;
}

}  // namespace logitprice
