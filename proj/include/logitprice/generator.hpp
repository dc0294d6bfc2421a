#pragma once

// Random instances in the style of the benchmark protocol:
//   a_ti ~ U[-7, 7], b_i ~ U[0.001, 0.01] (one shared draw in CP mode),
//   UB_i = (1 + W(e^{max_t a_ti - 1})) / b_i, LB_i = 0,
//   U_i ~ U[0.8 UB_i, UB_i], L_i ~ U[min(LB_i, 0.1 U_i), 0.3 U_i],
//   d ~ normalized U(0, 1] draws,
//   C/CP: 5 rows with alpha ~ U[0, 1] normalized to sum 1 and
//         beta ~ U[sum alpha L, 0.5 sum alpha U],
//   CP:   rules (0,1), (2,3), ... with r = gamma U_i, gamma ~ U[0.2, 0.5].
// Draws that produce an empty polytope are discarded and redrawn.

#include <boost/math/special_functions/lambert_w.hpp>

#include <cstdint>
#include <string>
#include <string_view>

#include "logitprice/convex.hpp"
#include "logitprice/model.hpp"
#include "logitprice/polytope.hpp"
#include "logitprice/rng.hpp"

namespace logitprice {

enum class ConstraintMode { U, C, CP };

inline std::string_view to_string(ConstraintMode mode) {
  switch (mode) {
    case ConstraintMode::U: return "U";
    case ConstraintMode::C: return "C";
    case ConstraintMode::CP: return "CP";
  }
  return "?";
}

inline ConstraintMode parse_mode(std::string_view text) {
  if (text == "U") return ConstraintMode::U;
  if (text == "C") return ConstraintMode::C;
  if (text == "CP") return ConstraintMode::CP;
  throw InvalidInput("unknown constraint mode '" + std::string(text) + "' (expected U, C or CP)");
}

inline constexpr std::size_t kCapacityRows = 5;
inline constexpr int kMaxResamples = 50;

class GenerationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Single-product revenue-maximizing price bound for intercept a_max and sensitivity b.
inline double theoretical_price_bound(double a_max, double b) {
  return (1.0 + boost::math::lambert_w0(std::exp(a_max - 1.0))) / b;
}

struct GeneratedInstance {
  PricingInstance instance;
  int resamples = 0;
};

namespace generator_detail {

inline PricingInstance draw(std::size_t m, std::size_t T, ConstraintMode mode, CounterRng& rng) {
  PricingInstance inst;
  inst.m = m;
  inst.T = T;
  inst.a.resize(m * T);
  for (auto& x : inst.a) x = rng.uniform(-7.0, 7.0);
  if (mode == ConstraintMode::CP) {
    inst.b.assign(m, rng.uniform(0.001, 0.01));
  } else {
    inst.b.resize(m);
    for (auto& x : inst.b) x = rng.uniform(0.001, 0.01);
  }
  for (std::size_t i = 0; i < m; ++i) {
    double a_max = inst.a[i];
    for (std::size_t t = 1; t < T; ++t) a_max = std::max(a_max, inst.intercept(t, i));
    const double ub = theoretical_price_bound(a_max, inst.b[i]);
    const double u_i = rng.uniform(0.8 * ub, ub);
    const double lb = 0.0;
    inst.U.push_back(u_i);
    inst.L.push_back(rng.uniform(std::min(lb, 0.1 * u_i), 0.3 * u_i));
  }
  double total = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const double w = 1.0 - rng.uniform();  // (0, 1]
    inst.d.push_back(w);
    total += w;
  }
  for (auto& w : inst.d) w /= total;
  if (mode != ConstraintMode::U) {
    for (std::size_t k = 0; k < kCapacityRows; ++k) {
      CapacityRow row;
      double sum = 0.0;
      for (std::size_t i = 0; i < m; ++i) sum += row.alpha.emplace_back(rng.uniform());
      if (sum == 0.0) row.alpha.assign(m, 1.0 / static_cast<double>(m));
      else
        for (auto& x : row.alpha) x /= sum;
      double sl = 0.0;
      double su = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        sl += row.alpha[i] * inst.L[i];
        su += row.alpha[i] * inst.U[i];
      }
      row.beta = rng.uniform(sl, 0.5 * su);
      inst.capacity.push_back(std::move(row));
    }
  }
  if (mode == ConstraintMode::CP) {
    for (std::size_t i = 0; i + 1 < m; i += 2) inst.pairwise.push_back({i, i + 1, rng.uniform(0.2, 0.5) * inst.U[i]});
  }
  return inst;
}

}  // namespace generator_detail

/// Deterministic in (m, T, mode, seed); throws GenerationFailure after 50 empty polytopes.
inline GeneratedInstance generate_instance_logged(std::size_t m, std::size_t T, ConstraintMode mode,
                                                  std::uint64_t seed) {
  if (m == 0 || T == 0) throw InvalidInput("m and T must be positive");
  CounterRng rng(stream_key({seed, m, T, static_cast<std::uint64_t>(mode)}));
  for (int attempt = 0; attempt <= kMaxResamples; ++attempt) {
    auto inst = generator_detail::draw(m, T, mode, rng);
    inst.seed = seed;
    inst.validate();
    bool feasible = true;
    if (!is_feasible(inst, inst.L, 0.0)) {
      try {
        feasible_point(inst);
      } catch (const Infeasible&) {
        feasible = false;
      }
    }
    if (feasible) return {std::move(inst), attempt};
  }
  throw GenerationFailure("no feasible instance after " + std::to_string(kMaxResamples) + " resamples (m=" +
                          std::to_string(m) + ", T=" + std::to_string(T) + ", mode=" +
                          std::string(to_string(mode)) + ", seed=" + std::to_string(seed) + ")");
}

inline PricingInstance generate_instance(std::size_t m, std::size_t T, ConstraintMode mode, std::uint64_t seed) {
  return generate_instance_logged(m, T, mode, seed).instance;
}

}  // namespace logitprice
