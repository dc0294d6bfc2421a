#pragma once

// Smooth convex programs built from three constraint atoms and solved by a
// primal log-barrier method.
//
//   maximize   offset + sum_j (c_j x_j - q_j x_j^2 - e_j x_j ln x_j)
//   subject to lo_j <= x_j <= hi_j
//              sum_j g_j x_j <= h                 (LINEAR)
//              s >= u ln u                         (ENTROPY_EPI, i.e. (-s, u, 1) in K_exp)
//              v <= ln u                           (LOG_HYPO,    i.e. (v, 1, u) in K_exp)
//
// The barrier is -sum log(-f_i) over every inequality, including finite box
// sides. Variables whose box has collapsed to a point are eliminated before
// each solve. A strictly interior start comes from the warm-start cache or a
// max-slack phase I; programs whose feasible set has no interior (opposing
// rows, collapsed McCormick envelopes) are solved with every non-box
// constraint relaxed by at most tol.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "logitprice/errors.hpp"

namespace logitprice::convex {

using VarId = std::size_t;
using RowId = std::size_t;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
/// Floor applied to the lower bound of every u that appears in a cone atom.
inline constexpr double kLogDomainFloor = 1e-12;

struct Term {
  VarId var;
  double coef;
};

enum class AtomKind { linear, entropy_epigraph, log_hypograph };

struct Variable {
  std::string name;
  double lo = -kInf;
  double hi = kInf;
  double linear = 0.0;     // + c x
  double quadratic = 0.0;  // - q x^2
  double entropy = 0.0;    // - e x ln x
};

struct LinearRow {
  std::vector<Term> terms;
  double rhs = 0.0;
};

struct ConeAtom {
  AtomKind kind;
  VarId first;  // s for the entropy epigraph, v for the log hypograph
  VarId u;
};

enum class Status { optimal, infeasible, max_iterations, numeric_failure };

inline std::string_view to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::max_iterations: return "max_iterations";
    case Status::numeric_failure: return "numeric_failure";
  }
  return "unknown";
}

struct SolveOptions {
  double tol = 1e-8;              // absolute bound on the duality-gap proxy
  std::size_t max_newton = 4000;  // Newton steps over all barrier stages
  double barrier_factor = 5.0;    // mu <- mu / barrier_factor per stage
  bool use_warm_start = true;
};

struct SolveOutcome {
  Status status = Status::numeric_failure;
  std::vector<double> point;  // full variable vector, fixed variables included
  double objective = 0.0;     // attained value at point
  double kkt_residual = kInf; // (nu + newton_decrement^2) / t at the final point
  double dual_bound = kInf;   // objective + kkt_residual; upper bound on the maximum
  std::size_t iterations = 0; // Newton steps, phase I included
  double infeasibility = 0.0; // phase-I residual when status == infeasible
  bool relaxed = false;       // solved with non-box constraints relaxed by <= tol
};

struct PhaseOneResult {
  bool feasible = false;
  std::vector<double> point;
  double margin = 0.0;         // smallest slack of any non-box constraint (rows normalized)
  double infeasibility = 0.0;  // minimized sum of violations when infeasible
  bool empty_interior = false; // feasible within tol but without a strict interior
};

class ConvexProgram {
 public:
  VarId add_variable(std::string name, double lo, double hi) {
    if (!(lo <= hi)) throw InvalidInput("empty box for variable " + name);
    vars_.push_back({std::move(name), lo, hi});
    log_domain_.push_back(false);
    warm_.clear();
    return vars_.size() - 1;
  }

  void set_linear_objective(VarId x, double c) { var(x).linear = c; }

  /// Adds -q x^2 to the maximized objective.
  void set_quadratic_objective(VarId x, double q) {
    if (q < 0.0) throw InvalidInput("quadratic objective weight must be >= 0");
    var(x).quadratic = q;
  }

  /// Adds -e x ln x to the maximized objective.
  void set_entropy_objective(VarId x, double e) {
    if (e < 0.0) throw InvalidInput("entropy objective weight must be >= 0");
    if (e > 0.0 && var(x).lo < 0.0) throw InvalidInput("entropy term needs a nonnegative variable");
    var(x).entropy = e;
  }

  void set_objective_offset(double offset) { offset_ = offset; }
  [[nodiscard]] double objective_offset() const { return offset_; }

  RowId add_linear(std::vector<Term> terms, double rhs) {
    check_terms(terms);
    rows_.push_back({std::move(terms), rhs});
    return rows_.size() - 1;
  }

  /// Rewrites a row in place; used for McCormick rows whose coefficients follow the node box.
  void set_linear(RowId row, std::vector<Term> terms, double rhs) {
    if (row >= rows_.size()) throw InvalidInput("row out of range");
    check_terms(terms);
    rows_[row] = {std::move(terms), rhs};
  }

  /// s >= u ln u.
  void add_entropy_epigraph(VarId s, VarId u) { add_atom(AtomKind::entropy_epigraph, s, u); }

  /// v <= ln u.
  void add_log_hypograph(VarId v, VarId u) { add_atom(AtomKind::log_hypograph, v, u); }

  void update_box(VarId x, double lo, double hi) {
    if (!(lo <= hi)) throw InvalidInput("update_box: empty box for " + var(x).name);
    auto& v = var(x);
    v.lo = log_domain_[x] ? std::max(lo, kLogDomainFloor) : lo;
    v.hi = hi;
    if (v.lo > v.hi) throw InvalidInput("update_box: box leaves the log domain for " + v.name);
  }

  [[nodiscard]] std::size_t num_variables() const { return vars_.size(); }
  [[nodiscard]] const Variable& variable(VarId x) const { return vars_.at(x); }
  [[nodiscard]] const std::vector<LinearRow>& rows() const { return rows_; }
  [[nodiscard]] const std::vector<ConeAtom>& atoms() const { return atoms_; }

  [[nodiscard]] double objective_value(std::span<const double> x) const {
    double total = offset_;
    for (std::size_t j = 0; j < vars_.size(); ++j) {
      const auto& v = vars_[j];
      total += v.linear * x[j] - v.quadratic * x[j] * x[j];
      if (v.entropy != 0.0 && x[j] > 0.0) total -= v.entropy * x[j] * std::log(x[j]);
    }
    return total;
  }

  /// Largest violation over boxes, rows and atoms (rows unnormalized).
  [[nodiscard]] double max_violation(std::span<const double> x) const {
    double worst = 0.0;
    for (std::size_t j = 0; j < vars_.size(); ++j)
      worst = std::max({worst, vars_[j].lo - x[j], x[j] - vars_[j].hi});
    for (const auto& row : rows_) {
      double lhs = -row.rhs;
      for (const auto& term : row.terms) lhs += term.coef * x[term.var];
      worst = std::max(worst, lhs);
    }
    for (const auto& atom : atoms_) {
      const double u = x[atom.u];
      if (u <= 0.0) return kInf;
      const double f = atom.kind == AtomKind::entropy_epigraph ? u * std::log(u) - x[atom.first]
                                                               : x[atom.first] - std::log(u);
      worst = std::max(worst, f);
    }
    return worst;
  }

  void clear_warm_start() { warm_.clear(); }
  [[nodiscard]] const std::vector<double>& warm_start() const { return warm_; }
  void set_warm_start(std::vector<double> x) {
    if (x.size() == vars_.size()) warm_ = std::move(x);
  }

  /// Line-oriented listing for bug reports.
  [[nodiscard]] std::string dump() const {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "# convexprogram v1\n";
    out << "variables " << vars_.size() << " rows " << rows_.size() << " atoms " << atoms_.size() << "\n";
    out << "offset " << offset_ << "\n";
    for (std::size_t j = 0; j < vars_.size(); ++j) {
      const auto& v = vars_[j];
      out << "var " << j << " " << v.name << " " << v.lo << " " << v.hi << " lin=" << v.linear
          << " quad=" << v.quadratic << " ent=" << v.entropy << "\n";
    }
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      out << "row " << r << " <= " << rows_[r].rhs << " :";
      for (const auto& term : rows_[r].terms) out << " " << term.coef << "*x" << term.var;
      out << "\n";
    }
    for (const auto& atom : atoms_) {
      out << "atom " << (atom.kind == AtomKind::entropy_epigraph ? "entropy_epi" : "log_hypo") << " x"
          << atom.first << " x" << atom.u << "\n";
    }
    return out.str();
  }

 private:
  Variable& var(VarId x) {
    if (x >= vars_.size()) throw InvalidInput("variable id out of range");
    return vars_[x];
  }

  void check_terms(const std::vector<Term>& terms) const {
    for (const auto& term : terms) {
      if (term.var >= vars_.size()) throw InvalidInput("row references unknown variable");
      if (!std::isfinite(term.coef)) throw InvalidInput("non-finite row coefficient");
    }
  }

  void add_atom(AtomKind kind, VarId first, VarId u) {
    auto& uv = var(u);
    var(first);
    if (uv.lo < 0.0) throw InvalidInput("cone atom needs u with a nonnegative lower bound");
    uv.lo = std::max(uv.lo, kLogDomainFloor);
    if (uv.lo > uv.hi) throw InvalidInput("cone atom: box of u lies below the log-domain floor");
    log_domain_[u] = true;
    atoms_.push_back({kind, first, u});
    warm_.clear();
  }

  std::vector<Variable> vars_;
  std::vector<bool> log_domain_;
  std::vector<LinearRow> rows_;
  std::vector<ConeAtom> atoms_;
  double offset_ = 0.0;
  std::vector<double> warm_;
};

namespace detail {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Mode { optimize, max_slack, sum_slack };

/// Reference to a program variable after elimination: a free column or a constant.
struct Ref {
  int col = -1;
  double value = 0.0;
  [[nodiscard]] double at(const VectorXd& x) const { return col >= 0 ? x[col] : value; }
};

struct Constraint {
  AtomKind kind = AtomKind::linear;
  std::vector<std::pair<int, double>> terms;  // linear: normalized coefficients on free columns
  double constant = 0.0;                      // linear: normalized fixed part minus rhs
  Ref first;
  Ref u;
  int slack = -1;  // phase-I slack column
};

/// Free-variable view of a ConvexProgram in minimization form.
class Engine {
 public:
  Engine(const ConvexProgram& prog, Mode mode, double relax) : mode_(mode), relax_(relax) {
    const std::size_t nv = prog.num_variables();
    col_of_.assign(nv, -1);
    fixed_value_.assign(nv, 0.0);
    for (std::size_t j = 0; j < nv; ++j) {
      const auto& v = prog.variable(j);
      const double scale = std::max({1.0, std::abs(v.lo), std::abs(v.hi)});
      if (std::isfinite(v.lo) && std::isfinite(v.hi) && v.hi - v.lo <= 1e-13 * scale) {
        fixed_value_[j] = 0.5 * (v.lo + v.hi);
        constant_objective_ += v.linear * fixed_value_[j] - v.quadratic * fixed_value_[j] * fixed_value_[j];
        if (v.entropy != 0.0 && fixed_value_[j] > 0.0)
          constant_objective_ -= v.entropy * fixed_value_[j] * std::log(fixed_value_[j]);
        continue;
      }
      col_of_[j] = static_cast<int>(program_cols_.size());
      program_cols_.push_back(j);
      lo_.push_back(v.lo);
      hi_.push_back(v.hi);
      c_.push_back(-v.linear);
      q_.push_back(v.quadratic);
      e_.push_back(v.entropy);
    }
    auto ref = [&](VarId j) { return Ref{col_of_[j], fixed_value_[j]}; };

    for (const auto& row : prog.rows()) {
      double norm2 = 0.0;
      for (const auto& term : row.terms) norm2 += term.coef * term.coef;
      const double scale = norm2 > 0.0 ? 1.0 / std::sqrt(norm2) : 1.0;
      Constraint con;
      con.kind = AtomKind::linear;
      con.constant = -row.rhs * scale;
      for (const auto& term : row.terms) {
        if (col_of_[term.var] >= 0) con.terms.emplace_back(col_of_[term.var], term.coef * scale);
        else con.constant += term.coef * scale * fixed_value_[term.var];
      }
      add_or_fold(std::move(con));
    }
    for (const auto& atom : prog.atoms()) {
      Constraint con;
      con.kind = atom.kind;
      con.first = ref(atom.first);
      con.u = ref(atom.u);
      add_or_fold(std::move(con));
    }

    n_program_ = static_cast<int>(program_cols_.size());
    if (mode_ == Mode::max_slack) {
      add_slack_column(-1.0, kInf);
      for (auto& con : cons_) con.slack = n_program_;
    } else if (mode_ == Mode::sum_slack) {
      for (auto& con : cons_) {
        con.slack = static_cast<int>(lo_.size());
        add_slack_column(0.0, kInf);
      }
    }
    n_ = static_cast<int>(lo_.size());
    nu_ = static_cast<double>(cons_.size());
    for (int k = 0; k < n_; ++k) nu_ += (std::isfinite(lo_[k]) ? 1.0 : 0.0) + (std::isfinite(hi_[k]) ? 1.0 : 0.0);
  }

  [[nodiscard]] int size() const { return n_; }
  [[nodiscard]] int program_size() const { return n_program_; }
  [[nodiscard]] double nu() const { return nu_; }
  [[nodiscard]] std::size_t num_constraints() const { return cons_.size(); }
  /// Worst violation among constraints whose variables are all fixed.
  [[nodiscard]] double folded_violation() const { return folded_violation_; }
  [[nodiscard]] double lo(int k) const { return lo_[k]; }
  [[nodiscard]] double hi(int k) const { return hi_[k]; }

  /// Raw constraint value f_i(x) (before slack and relaxation), +inf outside the log domain.
  [[nodiscard]] double raw(const Constraint& con, const VectorXd& x) const {
    switch (con.kind) {
      case AtomKind::linear: {
        double f = con.constant;
        for (const auto& [col, coef] : con.terms) f += coef * x[col];
        return f;
      }
      case AtomKind::entropy_epigraph: {
        const double u = con.u.at(x);
        if (!(u > 0.0)) return kInf;
        return u * std::log(u) - con.first.at(x);
      }
      case AtomKind::log_hypograph: {
        const double u = con.u.at(x);
        if (!(u > 0.0)) return kInf;
        return con.first.at(x) - std::log(u);
      }
    }
    return kInf;
  }

  [[nodiscard]] double shifted(const Constraint& con, const VectorXd& x) const {
    double f = raw(con, x) - relax_;
    if (con.slack >= 0) f -= x[con.slack];
    return f;
  }

  [[nodiscard]] double max_constraint(const VectorXd& x) const {
    double worst = -kInf;
    for (const auto& con : cons_) worst = std::max(worst, raw(con, x));
    return worst;
  }

  [[nodiscard]] bool strictly_inside_box(const VectorXd& x) const {
    for (int k = 0; k < n_; ++k)
      if (!(x[k] > lo_[k] && x[k] < hi_[k])) return false;
    return true;
  }

  /// Minimization-form objective f0.
  [[nodiscard]] double f0(const VectorXd& x) const {
    if (mode_ == Mode::max_slack) return x[n_program_];
    if (mode_ == Mode::sum_slack) return x.tail(n_ - n_program_).sum();
    double total = 0.0;
    for (int k = 0; k < n_program_; ++k) {
      total += c_[k] * x[k] + q_[k] * x[k] * x[k];
      if (e_[k] != 0.0) total += e_[k] * x[k] * std::log(x[k]);
    }
    return total;
  }

  /// Centering objective t f0 + barrier; false outside the domain.
  bool value(const VectorXd& x, double t, double& F) const {
    if (!strictly_inside_box(x)) return false;
    for (int k = 0; k < n_program_; ++k)
      if (e_[k] != 0.0 && !(x[k] > 0.0)) return false;
    double barrier = 0.0;
    for (int k = 0; k < n_; ++k) {
      if (std::isfinite(lo_[k])) barrier -= std::log(x[k] - lo_[k]);
      if (std::isfinite(hi_[k])) barrier -= std::log(hi_[k] - x[k]);
    }
    for (const auto& con : cons_) {
      const double f = shifted(con, x);
      if (!(f < 0.0)) return false;
      barrier -= std::log(-f);
    }
    F = t * f0(x) + barrier;
    return std::isfinite(F);
  }

  bool derivatives(const VectorXd& x, double t, double& F, VectorXd& g, MatrixXd& H) const {
    if (!value(x, t, F)) return false;
    g.setZero(n_);
    H.setZero(n_, n_);
    if (mode_ == Mode::max_slack) {
      g[n_program_] += t;
    } else if (mode_ == Mode::sum_slack) {
      for (int k = n_program_; k < n_; ++k) g[k] += t;
    } else {
      for (int k = 0; k < n_program_; ++k) {
        g[k] += t * (c_[k] + 2.0 * q_[k] * x[k]);
        H(k, k) += t * 2.0 * q_[k];
        if (e_[k] != 0.0) {
          g[k] += t * e_[k] * (std::log(x[k]) + 1.0);
          H(k, k) += t * e_[k] / x[k];
        }
      }
    }
    for (int k = 0; k < n_; ++k) {
      if (std::isfinite(lo_[k])) {
        const double s = x[k] - lo_[k];
        g[k] -= 1.0 / s;
        H(k, k) += 1.0 / (s * s);
      }
      if (std::isfinite(hi_[k])) {
        const double s = hi_[k] - x[k];
        g[k] += 1.0 / s;
        H(k, k) += 1.0 / (s * s);
      }
    }
    // Sparse gradient of one constraint: (column, value) pairs.
    std::vector<std::pair<int, double>> grad;
    for (const auto& con : cons_) {
      const double f = shifted(con, x);
      const double inv = -1.0 / f;  // > 0
      grad.clear();
      double curvature = 0.0;  // d2f/du2
      switch (con.kind) {
        case AtomKind::linear:
          grad = con.terms;
          break;
        case AtomKind::entropy_epigraph: {
          const double u = con.u.at(x);
          if (con.u.col >= 0) grad.emplace_back(con.u.col, std::log(u) + 1.0);
          if (con.first.col >= 0) grad.emplace_back(con.first.col, -1.0);
          curvature = 1.0 / u;
          break;
        }
        case AtomKind::log_hypograph: {
          const double u = con.u.at(x);
          if (con.u.col >= 0) grad.emplace_back(con.u.col, -1.0 / u);
          if (con.first.col >= 0) grad.emplace_back(con.first.col, 1.0);
          curvature = 1.0 / (u * u);
          break;
        }
      }
      if (con.slack >= 0) grad.emplace_back(con.slack, -1.0);
      for (const auto& [ci, gi] : grad) {
        g[ci] += gi * inv;
        for (const auto& [cj, gj] : grad) H(ci, cj) += gi * gj * inv * inv;
      }
      if (curvature != 0.0 && con.u.col >= 0) H(con.u.col, con.u.col) += curvature * inv;
    }
    return true;
  }

  /// Expands free columns back to the full program vector.
  [[nodiscard]] std::vector<double> expand(const VectorXd& x) const {
    std::vector<double> full(fixed_value_);
    for (int k = 0; k < n_program_; ++k) full[program_cols_[k]] = x[k];
    return full;
  }

  [[nodiscard]] VectorXd restrict(std::span<const double> full) const {
    VectorXd x(n_);
    for (int k = 0; k < n_program_; ++k) x[k] = full[program_cols_[k]];
    return x;
  }

  /// Box midpoint; half-infinite boxes start one unit inside.
  [[nodiscard]] VectorXd midpoint() const {
    VectorXd x(n_);
    for (int k = 0; k < n_; ++k) x[k] = interior_value(k, std::numeric_limits<double>::quiet_NaN());
    return x;
  }

  /// Moves a guess strictly inside the box of column k.
  [[nodiscard]] double interior_value(int k, double guess) const {
    const double lo = lo_[k];
    const double hi = hi_[k];
    if (std::isfinite(lo) && std::isfinite(hi)) {
      const double w = hi - lo;
      if (std::isnan(guess)) return lo + 0.5 * w;
      return std::clamp(guess, lo + 1e-3 * w, hi - 1e-3 * w);
    }
    if (std::isnan(guess)) {
      if (std::isfinite(lo)) return lo + 1.0;
      if (std::isfinite(hi)) return hi - 1.0;
      return 0.0;
    }
    if (std::isfinite(lo)) return std::max(guess, lo + 1e-3 * std::max(1.0, std::abs(lo)));
    if (std::isfinite(hi)) return std::min(guess, hi - 1e-3 * std::max(1.0, std::abs(hi)));
    return guess;
  }

  [[nodiscard]] const std::vector<Constraint>& constraints() const { return cons_; }

 private:
  void add_slack_column(double lo, double hi) {
    lo_.push_back(lo);
    hi_.push_back(hi);
  }

  void add_or_fold(Constraint con) {
    const bool has_free = !con.terms.empty() || con.first.col >= 0 || con.u.col >= 0;
    if (has_free) {
      cons_.push_back(std::move(con));
      return;
    }
    VectorXd none;
    folded_violation_ = std::max(folded_violation_, raw(con, none));
  }

  Mode mode_;
  double relax_;
  std::vector<int> col_of_;
  std::vector<double> fixed_value_;
  std::vector<VarId> program_cols_;
  std::vector<double> lo_, hi_, c_, q_, e_;
  std::vector<Constraint> cons_;
  double constant_objective_ = 0.0;
  double folded_violation_ = -kInf;
  double nu_ = 0.0;
  int n_ = 0;
  int n_program_ = 0;
};

/// Newton direction for H dx = -g with Jacobi scaling and up to three
/// regularization retries (lambda = 1e-10, 1e-9, 1e-8, 1e-7 on the scaled system).
inline bool newton_direction(const MatrixXd& H, const VectorXd& g, VectorXd& dx) {
  const int n = static_cast<int>(g.size());
  VectorXd dscale(n);
  for (int k = 0; k < n; ++k) {
    const double h = H(k, k);
    dscale[k] = (h > 0.0 && std::isfinite(h)) ? 1.0 / std::sqrt(h) : 1.0;
  }
  MatrixXd Hs = dscale.asDiagonal() * H * dscale.asDiagonal();
  const VectorXd gs = dscale.cwiseProduct(g);
  double lambda = 1e-10;
  for (int attempt = 0; attempt <= 3; ++attempt, lambda *= 10.0) {
    MatrixXd reg = Hs;
    reg.diagonal().array() += lambda;
    Eigen::LLT<MatrixXd> llt(reg);
    if (llt.info() != Eigen::Success) continue;
    const VectorXd y = llt.solve(-gs);
    if (!y.allFinite()) continue;
    dx = dscale.cwiseProduct(y);
    return true;
  }
  return false;
}

struct BarrierRun {
  VectorXd x;
  double t = 0.0;
  double decrement2 = 0.0;  // Newton decrement squared at x
  std::size_t newton = 0;
  bool stalled = false;
  bool numeric_failure = false;
  bool budget_exhausted = false;
  bool early_stop = false;
  std::optional<VectorXd> first_center;
};

/// Path following on t f0 + barrier. Stops when nu/t + decrement^2/t <= tol or
/// when stop(x) returns true after an accepted step.
template <typename StopFn>
BarrierRun follow_path(const Engine& eng, VectorXd x, double tol, const SolveOptions& opts, std::size_t budget,
                       StopFn&& stop) {
  BarrierRun run;
  const double nu = eng.nu();
  run.t = std::max(1e-12, nu / std::max(1.0, std::abs(eng.f0(x))));
  VectorXd g, dx;
  MatrixXd H;
  double F = 0.0;
  constexpr double kNewtonTol = 1e-10;  // decrement^2 / 2
  for (int stage = 0;; ++stage) {
    for (int inner = 0; inner < 200; ++inner) {
      if (!eng.derivatives(x, run.t, F, g, H)) {
        run.numeric_failure = true;
        run.x = x;
        return run;
      }
      if (!newton_direction(H, g, dx)) {
        run.numeric_failure = true;
        run.x = x;
        return run;
      }
      const double lambda2 = std::max(0.0, -g.dot(dx));
      run.decrement2 = lambda2;
      if (lambda2 * 0.5 <= kNewtonTol) break;
      if (run.newton >= budget) {
        run.budget_exhausted = true;
        run.x = x;
        return run;
      }
      const double lambda = std::sqrt(lambda2);
      double step = lambda > 0.25 ? 1.0 / (1.0 + lambda) : 1.0;
      double Fn = 0.0;
      VectorXd trial = x + step * dx;
      while (!eng.value(trial, run.t, Fn)) {
        step *= 0.5;
        if (step < 1e-16) break;
        trial = x + step * dx;
      }
      if (step >= 1e-16 && lambda > 0.25) {
        // Armijo only in the damped phase; near the center F is flat to rounding.
        while (Fn > F - 0.01 * step * lambda2) {
          step *= 0.5;
          if (step < 1e-16) break;
          trial = x + step * dx;
          if (!eng.value(trial, run.t, Fn)) Fn = kInf;
        }
      }
      if (step < 1e-16) {
        run.stalled = true;
        break;
      }
      x = trial;
      ++run.newton;
      if (stop(x)) {
        run.early_stop = true;
        run.x = x;
        return run;
      }
    }
    if (stage == 0) run.first_center = x;
    const double gap = (nu + run.decrement2) / run.t;
    if (gap <= tol || run.stalled) break;
    run.t *= opts.barrier_factor;
  }
  run.x = x;
  return run;
}

struct PhaseOneOutcome {
  VectorXd x;             // program columns only
  double sigma = kInf;    // minimized max-slack value
  std::size_t newton = 0;
  bool numeric_failure = false;
};

/// min sigma s.t. f_i(x) <= sigma, box strict, sigma >= -1. Stops early once sigma < -0.5.
inline PhaseOneOutcome max_slack_phase(const ConvexProgram& prog, const VectorXd& start, double tol,
                                       const SolveOptions& opts) {
  Engine eng(prog, Mode::max_slack, 0.0);
  const int n = eng.program_size();
  VectorXd x(eng.size());
  x.head(n) = start;
  Engine base(prog, Mode::optimize, 0.0);
  const double worst = base.max_constraint(start);
  x[n] = std::max(worst, -0.5) + 1.0;
  auto run = follow_path(eng, x, tol, opts, opts.max_newton, [&](const VectorXd& y) { return y[n] < -0.5; });
  PhaseOneOutcome out;
  out.x = run.x.head(n);
  out.sigma = base.max_constraint(out.x);
  out.newton = run.newton;
  out.numeric_failure = run.numeric_failure;
  return out;
}

}  // namespace detail

/// Strictly interior point, or the minimized aggregate infeasibility.
inline PhaseOneResult phase_one(const ConvexProgram& prog, double tol = 1e-8, const SolveOptions& opts = {}) {
  using namespace detail;
  Engine base(prog, Mode::optimize, 0.0);
  PhaseOneResult res;
  const VectorXd mid = base.midpoint();
  if (base.folded_violation() > tol) {
    res.infeasibility = base.folded_violation();
    return res;
  }
  if (base.num_constraints() == 0 || base.max_constraint(mid) < 0.0) {
    res.feasible = true;
    res.point = base.expand(mid);
    res.margin = base.num_constraints() == 0 ? kInf : -base.max_constraint(mid);
    return res;
  }
  auto p1 = max_slack_phase(prog, mid, tol / 10.0, opts);
  if (p1.numeric_failure) throw NumericFailure("phase one: singular Newton system");
  if (p1.sigma <= tol) {
    res.feasible = true;
    res.point = base.expand(p1.x);
    res.margin = -p1.sigma;
    res.empty_interior = p1.sigma >= -tol / 2.0;
    return res;
  }
  // Infeasible: minimize the sum of per-constraint violations for the certificate.
  Engine agg(prog, Mode::sum_slack, 0.0);
  const int n = agg.program_size();
  VectorXd x(agg.size());
  x.head(n) = p1.x;
  for (const auto& con : agg.constraints()) x[con.slack] = std::max(agg.raw(con, x), 0.0) + 1.0;
  auto run = follow_path(agg, x, tol / 10.0, opts, opts.max_newton, [](const VectorXd&) { return false; });
  if (run.numeric_failure) throw NumericFailure("phase one: singular Newton system");
  res.feasible = false;
  res.point = agg.expand(run.x);
  res.infeasibility = agg.f0(run.x);
  return res;
}

/// Solves the program to an absolute duality-gap proxy of opts.tol.
inline SolveOutcome solve(ConvexProgram& prog, const SolveOptions& opts = {}) {
  using namespace detail;
  if (!(opts.tol > 0.0)) throw InvalidInput("solve: tol must be positive");
  SolveOutcome out;
  const double tol = opts.tol;
  Engine eng0(prog, Mode::optimize, 0.0);
  if (eng0.folded_violation() > tol) {
    out.status = Status::infeasible;
    out.infeasibility = eng0.folded_violation();
    return out;
  }

  VectorXd x;
  const auto& warm = prog.warm_start();
  if (opts.use_warm_start && warm.size() == prog.num_variables()) {
    x = eng0.restrict(warm);
    for (int k = 0; k < eng0.program_size(); ++k) x[k] = eng0.interior_value(k, x[k]);
  } else {
    x = eng0.midpoint();
  }

  double relax = 0.0;
  if (eng0.program_size() > 0 && eng0.num_constraints() > 0 && !(eng0.max_constraint(x) < -1e-9)) {
    auto p1 = max_slack_phase(prog, x, tol / 10.0, opts);
    out.iterations += p1.newton;
    if (p1.numeric_failure) {
      out.status = Status::numeric_failure;
      return out;
    }
    if (p1.sigma > tol) {
      out.status = Status::infeasible;
      out.infeasibility = p1.sigma;
      return out;
    }
    if (p1.sigma >= -tol / 2.0) relax = std::max(p1.sigma, 0.0) + tol / 2.0;
    x = p1.x;
  }

  Engine eng(prog, Mode::optimize, relax);
  out.relaxed = relax > 0.0;
  if (eng.size() == 0) {
    out.point = eng.expand(x);
    out.objective = prog.objective_value(out.point);
    out.kkt_residual = 0.0;
    out.dual_bound = out.objective;
    out.status = Status::optimal;
    return out;
  }

  auto run = follow_path(eng, x, tol, opts, opts.max_newton, [](const VectorXd&) { return false; });
  out.iterations += run.newton;
  out.point = eng.expand(run.x);
  out.objective = prog.objective_value(out.point);
  out.kkt_residual = (eng.nu() + run.decrement2) / run.t;
  out.dual_bound = out.objective + out.kkt_residual;
  if (run.first_center) prog.set_warm_start(eng.expand(*run.first_center));
  if (run.numeric_failure) out.status = Status::numeric_failure;
  else if (run.budget_exhausted) out.status = Status::max_iterations;
  else if (out.kkt_residual <= tol) out.status = Status::optimal;
  else out.status = Status::numeric_failure;
  return out;
}

inline SolveOutcome solve(ConvexProgram& prog, double tol) {
  SolveOptions opts;
  opts.tol = tol;
  return solve(prog, opts);
}

}  // namespace logitprice::convex
