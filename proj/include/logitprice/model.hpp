#pragma once

// Pricing instances under (finite-mixture) multinomial logit demand and exact
// evaluation of revenue, choice probabilities, constraints and the two
// exponential variable changes used by the solvers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "logitprice/errors.hpp"

namespace logitprice {

/// Utilities are clamped to this magnitude before exponentiation.
inline constexpr double kUtilityClamp = 700.0;
inline constexpr double kDefaultFeasibilityTol = 1e-8;
/// Index used by choice_probability for the outside option.
inline constexpr std::size_t kNoPurchase = std::numeric_limits<std::size_t>::max();

using PriceVector = std::vector<double>;

struct CapacityRow {
  std::vector<double> alpha;  // nonnegative weights, one per product
  double beta = 0.0;          // budget
};

/// Encodes p_i <= p_j + r.
struct PairwiseRule {
  std::size_t i = 0;
  std::size_t j = 0;
  double r = 0.0;
};

struct PricingInstance {
  std::size_t m = 0;  // products
  std::size_t T = 0;  // customer segments
  std::vector<double> a;  // row-major T x m utility intercepts
  std::vector<double> b;  // price sensitivities, shared across segments
  std::vector<double> d;  // segment weights
  std::vector<double> L;
  std::vector<double> U;
  std::vector<CapacityRow> capacity;
  std::vector<PairwiseRule> pairwise;
  std::optional<std::uint64_t> seed;

  [[nodiscard]] double intercept(std::size_t t, std::size_t i) const { return a[t * m + i]; }

  [[nodiscard]] bool common_sensitivity(double tol = 1e-12) const {
    return std::all_of(b.begin(), b.end(), [&](double bi) { return std::abs(bi - b.front()) <= tol; });
  }

  [[nodiscard]] bool has_coupling_rows() const { return !capacity.empty() || !pairwise.empty(); }

  /// Throws InvalidInput on any broken invariant.
  void validate() const {
    auto fail = [](const std::string& what) { throw InvalidInput("invalid instance: " + what); };
    if (m == 0) fail("m must be positive");
    if (T == 0) fail("T must be positive");
    if (a.size() != T * m) fail("a must hold T*m entries");
    if (b.size() != m || L.size() != m || U.size() != m) fail("b, L, U must hold m entries");
    if (d.size() != T) fail("d must hold T entries");
    auto finite = [](double x) { return std::isfinite(x); };
    if (!std::all_of(a.begin(), a.end(), finite)) fail("a has non-finite entries");
    double dsum = 0.0;
    for (double dt : d) {
      if (!(dt > 0.0) || !finite(dt)) fail("segment weights must be positive");
      dsum += dt;
    }
    if (std::abs(dsum - 1.0) > 1e-12) fail("segment weights must sum to 1");
    for (std::size_t i = 0; i < m; ++i) {
      if (!(b[i] > 0.0) || !finite(b[i])) fail("price sensitivities must be positive");
      if (!finite(L[i]) || !finite(U[i])) fail("price bounds must be finite");
      if (L[i] < 0.0) fail("negative price lower bound");
      if (L[i] > U[i]) fail("L > U for product " + std::to_string(i));
      for (std::size_t t = 0; t < T; ++t) {
        const double hi = intercept(t, i) - b[i] * L[i];
        const double lo = intercept(t, i) - b[i] * U[i];
        if (hi > kUtilityClamp || lo < -kUtilityClamp) fail("utility outside [-700, 700]");
      }
    }
    for (const auto& row : capacity) {
      if (row.alpha.size() != m) fail("capacity row must hold m weights");
      for (double w : row.alpha)
        if (!(w >= 0.0) || !finite(w)) fail("capacity weights must be nonnegative");
      if (!finite(row.beta)) fail("capacity budget must be finite");
    }
    for (const auto& rule : pairwise) {
      if (rule.i >= m || rule.j >= m) fail("pairwise index out of range");
      if (!finite(rule.r)) fail("pairwise margin must be finite");
    }
    if (!pairwise.empty() && !common_sensitivity())
      fail("pairwise rules require a common price sensitivity");
  }
};

enum class SolveStatus { optimal, eps_optimal, feasible_heuristic, infeasible, time_limit };

inline std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::eps_optimal: return "eps_optimal";
    case SolveStatus::feasible_heuristic: return "feasible_heuristic";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::time_limit: return "time_limit";
  }
  return "unknown";
}

struct Solution {
  PriceVector prices;
  double revenue = 0.0;
  SolveStatus status = SolveStatus::infeasible;
  double gap = 0.0;
  std::map<std::string, double> diagnostics;
};

inline double clamped_exp(double utility) {
  return std::exp(std::clamp(utility, -kUtilityClamp, kUtilityClamp));
}

/// Revenue contributed by one segment, before weighting by d_t.
inline double segment_revenue(const PricingInstance& inst, std::size_t t, std::span<const double> p) {
  double num = 0.0;
  double den = 1.0;
  for (std::size_t i = 0; i < inst.m; ++i) {
    const double w = clamped_exp(inst.intercept(t, i) - inst.b[i] * p[i]);
    num += p[i] * w;
    den += w;
  }
  return num / den;
}

inline double revenue(const PricingInstance& inst, std::span<const double> p) {
  double total = 0.0;
  for (std::size_t t = 0; t < inst.T; ++t) total += inst.d[t] * segment_revenue(inst, t, p);
  return total;
}

/// dR/dp_i = sum_t d_t P_t(i) (1 - b_i (p_i - R_t)).
inline std::vector<double> revenue_gradient(const PricingInstance& inst, std::span<const double> p) {
  std::vector<double> grad(inst.m, 0.0);
  std::vector<double> w(inst.m);
  for (std::size_t t = 0; t < inst.T; ++t) {
    double num = 0.0;
    double den = 1.0;
    for (std::size_t i = 0; i < inst.m; ++i) {
      w[i] = clamped_exp(inst.intercept(t, i) - inst.b[i] * p[i]);
      num += p[i] * w[i];
      den += w[i];
    }
    const double rt = num / den;
    for (std::size_t i = 0; i < inst.m; ++i)
      grad[i] += inst.d[t] * (w[i] / den) * (1.0 - inst.b[i] * (p[i] - rt));
  }
  return grad;
}

/// P_t(i | p); pass kNoPurchase for the outside option.
inline double choice_probability(const PricingInstance& inst, std::size_t t, std::size_t i,
                                 std::span<const double> p) {
  if (t >= inst.T) throw InvalidInput("segment index out of range");
  if (i != kNoPurchase && i >= inst.m) throw InvalidInput("product index out of range");
  double den = 1.0;
  double wi = 1.0;
  for (std::size_t j = 0; j < inst.m; ++j) {
    const double w = clamped_exp(inst.intercept(t, j) - inst.b[j] * p[j]);
    den += w;
    if (j == i) wi = w;
  }
  return wi / den;
}

struct ConstraintViolation {
  enum class Kind { lower_bound, upper_bound, capacity, pairwise };
  Kind kind;
  std::size_t index;  // product, capacity row or pairwise rule
  double magnitude;
};

inline std::vector<ConstraintViolation> check_feasibility(const PricingInstance& inst, std::span<const double> p,
                                                          double tol = kDefaultFeasibilityTol) {
  using Kind = ConstraintViolation::Kind;
  std::vector<ConstraintViolation> out;
  for (std::size_t i = 0; i < inst.m; ++i) {
    if (inst.L[i] - p[i] > tol) out.push_back({Kind::lower_bound, i, inst.L[i] - p[i]});
    if (p[i] - inst.U[i] > tol) out.push_back({Kind::upper_bound, i, p[i] - inst.U[i]});
  }
  for (std::size_t k = 0; k < inst.capacity.size(); ++k) {
    const auto& row = inst.capacity[k];
    double lhs = 0.0;
    for (std::size_t i = 0; i < inst.m; ++i) lhs += row.alpha[i] * p[i];
    if (lhs - row.beta > tol) out.push_back({Kind::capacity, k, lhs - row.beta});
  }
  for (std::size_t k = 0; k < inst.pairwise.size(); ++k) {
    const auto& rule = inst.pairwise[k];
    const double excess = p[rule.i] - p[rule.j] - rule.r;
    if (excess > tol) out.push_back({Kind::pairwise, k, excess});
  }
  return out;
}

inline bool is_feasible(const PricingInstance& inst, std::span<const double> p, double tol = kDefaultFeasibilityTol) {
  return check_feasibility(inst, p, tol).empty();
}

// u_i = exp(a_i - b_i p_i) for a single segment.
inline std::vector<double> mnl_transform(const PricingInstance& inst, std::span<const double> p) {
  if (inst.T != 1) throw InvalidInput("mnl_transform needs a single segment");
  std::vector<double> u(inst.m);
  for (std::size_t i = 0; i < inst.m; ++i) u[i] = clamped_exp(inst.a[i] - inst.b[i] * p[i]);
  return u;
}

inline PriceVector mnl_untransform(const PricingInstance& inst, std::span<const double> u) {
  if (inst.T != 1) throw InvalidInput("mnl_untransform needs a single segment");
  PriceVector p(inst.m);
  for (std::size_t i = 0; i < inst.m; ++i) {
    if (!(u[i] > 0.0)) throw InvalidInput("transformed variable must be positive");
    p[i] = (inst.a[i] - std::log(u[i])) / inst.b[i];
  }
  return p;
}

// u_i = exp(-b_i p_i), segment independent.
inline std::vector<double> fmnl_transform(const PricingInstance& inst, std::span<const double> p) {
  std::vector<double> u(inst.m);
  for (std::size_t i = 0; i < inst.m; ++i) u[i] = clamped_exp(-inst.b[i] * p[i]);
  return u;
}

inline PriceVector fmnl_untransform(const PricingInstance& inst, std::span<const double> u) {
  PriceVector p(inst.m);
  for (std::size_t i = 0; i < inst.m; ++i) {
    if (!(u[i] > 0.0)) throw InvalidInput("transformed variable must be positive");
    p[i] = -std::log(u[i]) / inst.b[i];
  }
  return p;
}

/// Single-segment revenue written in u = exp(a - b p); strictly quasiconcave in u.
inline double transformed_revenue_mnl(const PricingInstance& inst, std::span<const double> u) {
  if (inst.T != 1) throw InvalidInput("transformed_revenue_mnl needs a single segment");
  double num = 0.0;
  double den = 1.0;
  for (std::size_t i = 0; i < inst.m; ++i) {
    if (!(u[i] > 0.0)) throw InvalidInput("transformed variable must be positive");
    num += u[i] * (inst.a[i] - std::log(u[i])) / inst.b[i];
    den += u[i];
  }
  return num / den;
}

enum class Transform { mnl, fmnl };

/// Row u[upper] - factor * u[lower] <= 0.
struct TransformedPairwise {
  std::size_t upper;  // j
  std::size_t lower;  // i
  double factor;
};

/// p_i <= p_j + r becomes u_j <= e^{b r} u_i (fmnl) or u_j <= e^{b r + a_j - a_i} u_i (mnl).
inline std::vector<TransformedPairwise> pairwise_to_u(const PricingInstance& inst, Transform which) {
  if (!inst.pairwise.empty() && !inst.common_sensitivity())
    throw InvalidInput("pairwise rules require a common price sensitivity");
  if (which == Transform::mnl && inst.T != 1) throw InvalidInput("mnl transform needs a single segment");
  std::vector<TransformedPairwise> rows;
  rows.reserve(inst.pairwise.size());
  for (const auto& rule : inst.pairwise) {
    double exponent = inst.b[rule.i] * rule.r;
    if (which == Transform::mnl) exponent += inst.a[rule.j] - inst.a[rule.i];
    rows.push_back({rule.j, rule.i, std::exp(exponent)});
  }
  return rows;
}

}  // namespace logitprice
