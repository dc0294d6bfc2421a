#pragma once

// Bisection on the Dinkelbach value function for single-segment MNL pricing.
// phi(theta) = max_{p in P} sum_i p_i w_i - theta (1 + sum_i w_i), w_i = e^{a_i - b_i p_i},
// is strictly decreasing with root theta* = optimal revenue. Each evaluation
// is a concave program in u = e^{a - b p}.

#include <cmath>
#include <span>
#include <vector>

#include "logitprice/convex.hpp"
#include "logitprice/intervals.hpp"
#include "logitprice/model.hpp"
#include "logitprice/polytope.hpp"

namespace logitprice {

struct ThetaInterval {
  double theta_min = 0.0;
  double theta_max = 0.0;
};

inline void require_single_segment(const PricingInstance& inst, const char* who) {
  if (inst.T != 1) throw InvalidInput(std::string(who) + " needs a single-segment instance");
}

/// G(p, theta) = sum_i p_i w_i - theta (1 + sum_j w_j).
inline double g_value(const PricingInstance& inst, std::span<const double> p, double theta) {
  require_single_segment(inst, "g_value");
  double num = 0.0;
  double den = 1.0;
  for (std::size_t i = 0; i < inst.m; ++i) {
    const double w = clamped_exp(inst.a[i] - inst.b[i] * p[i]);
    num += p[i] * w;
    den += w;
  }
  return num - theta * den;
}

/// 1 + sum_i e^{a_i - b_i U_i}: a lower bound on |phi'(theta)|.
inline double slope_bound(const PricingInstance& inst) {
  require_single_segment(inst, "slope_bound");
  double s = 1.0;
  for (std::size_t i = 0; i < inst.m; ++i) s += clamped_exp(inst.a[i] - inst.b[i] * inst.U[i]);
  return s;
}

struct SubproblemResult {
  double phi = 0.0;         // attained value
  double phi_upper = 0.0;   // certified upper bound on phi(theta)
  std::vector<double> u;
  PriceVector prices;       // feasible prices recovered from u
  convex::Status status = convex::Status::numeric_failure;
  std::size_t newton = 0;
};

/// Persistent program for phi(theta): only the objective changes between calls,
/// so each solve warm-starts from the previous one.
class Subproblem {
 public:
  explicit Subproblem(const PricingInstance& inst) : inst_(inst) {
    require_single_segment(inst, "Subproblem");
    inst.validate();
    const std::size_t m = inst.m;
    const bool need_v = !inst.capacity.empty();
    for (std::size_t i = 0; i < m; ++i) {
      const double a = inst.a[i];
      const double b = inst.b[i];
      const double u_lo = std::exp(a - b * inst.U[i]);
      const double u_hi = std::exp(a - b * inst.L[i]);
      const auto [s_lo, s_hi] = s_bounds(u_lo, u_hi);
      const auto tag = std::to_string(i);
      u_.push_back(prog_.add_variable("u" + tag, u_lo, u_hi));
      s_.push_back(prog_.add_variable("s" + tag, s_lo, s_hi));
      prog_.add_entropy_epigraph(s_.back(), u_.back());
      prog_.set_linear_objective(s_.back(), -1.0 / b);
      if (need_v) {
        v_.push_back(prog_.add_variable("v" + tag, a - b * inst.U[i], a - b * inst.L[i]));
        prog_.add_log_hypograph(v_.back(), u_.back());
      }
    }
    // sum_i alpha_i (a_i - v_i) / b_i <= beta.
    for (const auto& row : inst.capacity) {
      std::vector<convex::Term> terms;
      double rhs = row.beta;
      for (std::size_t i = 0; i < m; ++i) {
        if (row.alpha[i] == 0.0) continue;
        terms.push_back({v_[i], -row.alpha[i] / inst.b[i]});
        rhs -= row.alpha[i] * inst.a[i] / inst.b[i];
      }
      prog_.add_linear(std::move(terms), rhs);
    }
    for (const auto& row : pairwise_to_u(inst, Transform::mnl))
      prog_.add_linear({{u_[row.upper], 1.0}, {u_[row.lower], -row.factor}}, 0.0);
  }

  SubproblemResult solve(double theta, double tol) {
    if (!(theta >= 0.0)) throw InvalidInput("theta must be nonnegative");
    for (std::size_t i = 0; i < inst_.m; ++i) prog_.set_linear_objective(u_[i], inst_.a[i] / inst_.b[i] - theta);
    prog_.set_objective_offset(-theta);
    convex::SolveOptions opts;
    opts.tol = tol;
    auto out = convex::solve(prog_, opts);
    SubproblemResult res;
    res.status = out.status;
    res.newton = out.iterations;
    if (out.status == convex::Status::infeasible) throw Infeasible("price polytope is empty");
    if (out.point.empty()) throw NumericFailure("subproblem solve failed");
    res.phi = out.objective;
    res.phi_upper = out.dual_bound;
    for (auto id : u_) res.u.push_back(out.point[id]);
    res.prices = recover_prices(res.u);
    return res;
  }

  /// p = (a - ln u) / b, clipped to the box and projected when a coupling row is violated.
  [[nodiscard]] PriceVector recover_prices(std::span<const double> u) const {
    PriceVector p = clip_to_box(inst_, mnl_untransform(inst_, u));
    if (!is_feasible(inst_, p, kDefaultFeasibilityTol)) p = project_prices(inst_, p);
    return p;
  }

  convex::ConvexProgram& program() { return prog_; }

 private:
  const PricingInstance& inst_;
  convex::ConvexProgram prog_;
  std::vector<convex::VarId> u_, s_, v_;
};

/// One-off evaluation of phi(theta).
inline SubproblemResult solve_subproblem(const PricingInstance& inst, double theta, double tol) {
  Subproblem sp(inst);
  return sp.solve(theta, tol);
}

/// [revenue at a feasible point, max_i U_i]; L is used when feasible.
inline ThetaInterval init_theta_interval(const PricingInstance& inst) {
  require_single_segment(inst, "init_theta_interval");
  const PriceVector p0 = feasible_point(inst);
  return {revenue(inst, p0), *std::max_element(inst.U.begin(), inst.U.end())};
}

struct BisectionStep {
  double theta = 0.0;
  double phi = 0.0;
  double phi_upper = 0.0;
  double theta_min = 0.0;  // after the step
  double theta_max = 0.0;
};

struct BisectionResult {
  Solution solution;
  ThetaInterval initial;
  double phi_tol = 0.0;
  std::vector<BisectionStep> steps;
};

/// Bisection with absolute revenue accuracy eps. Stops at theta_max - theta_min <= eps/2
/// with phi solved to (eps/10) * slope_bound, so the returned revenue is within 0.6 eps of theta*.
inline BisectionResult bisection_run(const PricingInstance& inst, double eps) {
  require_single_segment(inst, "bisection_solve");
  if (!(eps > 0.0)) throw InvalidInput("eps must be positive");
  inst.validate();
  BisectionResult res;
  PriceVector best_p = feasible_point(inst);
  double best_rev = revenue(inst, best_p);
  res.initial = {best_rev, *std::max_element(inst.U.begin(), inst.U.end())};
  double lo = res.initial.theta_min;
  double hi = std::max(res.initial.theta_max, lo);
  res.phi_tol = eps / 10.0 * slope_bound(inst);

  Subproblem sp(inst);
  std::size_t newton = 0;
  while (hi - lo > eps / 2.0) {
    const double theta = 0.5 * (lo + hi);
    auto r = sp.solve(theta, res.phi_tol);
    newton += r.newton;
    const double rev = revenue(inst, r.prices);
    if (rev > best_rev) {
      best_rev = rev;
      best_p = r.prices;
    }
    if (r.phi_upper < 0.0) hi = theta;
    else lo = theta;
    lo = std::min(std::max(lo, best_rev), hi);
    res.steps.push_back({theta, r.phi, r.phi_upper, lo, hi});
  }

  auto& sol = res.solution;
  sol.prices = best_p;
  sol.revenue = best_rev;
  sol.status = SolveStatus::eps_optimal;
  sol.gap = std::max(0.0, hi - best_rev) / std::max(1.0, std::abs(best_rev));
  sol.diagnostics["iterations"] = static_cast<double>(res.steps.size());
  sol.diagnostics["newton_steps"] = static_cast<double>(newton);
  sol.diagnostics["theta_min"] = lo;
  sol.diagnostics["theta_max"] = hi;
  sol.diagnostics["upper_bound"] = hi;
  sol.diagnostics["phi_tol"] = res.phi_tol;
  sol.diagnostics["slope_bound"] = slope_bound(inst);
  return res;
}

inline Solution bisection_solve(const PricingInstance& inst, double eps) { return bisection_run(inst, eps).solution; }

}  // namespace logitprice
