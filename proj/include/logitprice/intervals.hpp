#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "logitprice/errors.hpp"

namespace logitprice {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  [[nodiscard]] double width() const { return hi - lo; }
  [[nodiscard]] bool contains(double x, double slack = 0.0) const { return x >= lo - slack && x <= hi + slack; }
};

/// Exact range of u ln u over [u_lo, u_hi]; the minimum -1/e sits at u = 1/e.
inline std::pair<double, double> s_bounds(double u_lo, double u_hi) {
  if (!(u_lo > 0.0)) throw InvalidInput("s_bounds: u_lo must be positive");
  if (u_lo > u_hi) throw InvalidInput("s_bounds: u_lo > u_hi");
  const double inv_e = std::exp(-1.0);
  const double f_lo = u_lo * std::log(u_lo);
  const double f_hi = u_hi * std::log(u_hi);
  if (u_hi <= inv_e) return {f_hi, f_lo};
  if (u_lo >= inv_e) return {f_lo, f_hi};
  return {-inv_e, std::max(f_lo, f_hi)};
}

}  // namespace logitprice
