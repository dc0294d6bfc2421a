#pragma once

#include <stdexcept>
#include <string>

namespace logitprice {

/// Malformed instance, bad argument, or violated precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The price polytope (or a program built from it) has no feasible point.
class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solver breakdown: singular Newton systems, NaNs, exhausted iteration budgets.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace logitprice
