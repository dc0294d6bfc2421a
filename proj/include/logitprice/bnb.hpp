#pragma once

// Spatial branch-and-bound for mixed-logit pricing. With u_i = e^{-b_i p_i},
// segment t contributes theta_t = y_t / z_t where
//   y_t = sum_i C_ti u_i ln u_i,  C_ti = -e^{a_ti} / b_i,
//   z_t = 1 + sum_i e^{a_ti} u_i.
// Each node relaxes y_t = theta_t z_t by its McCormick envelope over the node
// box and solves the resulting concave program; boxes on (theta_t, z_t) are
// bisected best-first until the bound gap closes.

#include <array>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "logitprice/baselines.hpp"
#include "logitprice/convex.hpp"
#include "logitprice/intervals.hpp"
#include "logitprice/mnl.hpp"
#include "logitprice/model.hpp"
#include "logitprice/polytope.hpp"

namespace logitprice {

struct NodeBounds {
  std::vector<Interval> theta;
  std::vector<Interval> z;
};

struct RootBounds {
  std::vector<Interval> u, s, v;  // per product
  std::vector<Interval> y;        // per segment
  NodeBounds node;
};

/// Interval bounds implied by L <= p <= U. theta uses all four corner ratios of y/z.
inline RootBounds init_global_bounds(const PricingInstance& inst) {
  RootBounds rb;
  for (std::size_t i = 0; i < inst.m; ++i) {
    const double b = inst.b[i];
    const Interval u{std::exp(-b * inst.U[i]), std::exp(-b * inst.L[i])};
    const auto [s_lo, s_hi] = s_bounds(u.lo, u.hi);
    rb.u.push_back(u);
    rb.s.push_back({s_lo, s_hi});
    rb.v.push_back({-b * inst.U[i], -b * inst.L[i]});
  }
  for (std::size_t t = 0; t < inst.T; ++t) {
    Interval y{0.0, 0.0};
    Interval z{1.0, 1.0};
    for (std::size_t i = 0; i < inst.m; ++i) {
      const double ea = std::exp(inst.intercept(t, i));
      const double c = -ea / inst.b[i];
      y.lo += c * rb.s[i].hi;
      y.hi += c * rb.s[i].lo;
      z.lo += ea * rb.u[i].lo;
      z.hi += ea * rb.u[i].hi;
    }
    const std::array<double, 4> corners{y.lo / z.lo, y.lo / z.hi, y.hi / z.lo, y.hi / z.hi};
    rb.y.push_back(y);
    rb.node.z.push_back(z);
    rb.node.theta.push_back(
        {*std::min_element(corners.begin(), corners.end()), *std::max_element(corners.begin(), corners.end())});
  }
  return rb;
}

/// Caps theta_t at a certified upper bound on the box-only optimum of segment t
/// alone. Valid because segment t's revenue never exceeds that optimum.
inline void tighten_theta_bounds(const PricingInstance& inst, NodeBounds& nb) {
  for (std::size_t t = 0; t < inst.T; ++t) {
    PricingInstance seg;
    seg.m = inst.m;
    seg.T = 1;
    seg.a.assign(inst.a.begin() + static_cast<std::ptrdiff_t>(t * inst.m),
                 inst.a.begin() + static_cast<std::ptrdiff_t>((t + 1) * inst.m));
    seg.b = inst.b;
    seg.d = {1.0};
    seg.L = inst.L;
    seg.U = inst.U;
    const double scale = std::max(1.0, *std::max_element(inst.U.begin(), inst.U.end()));
    const auto sol = bisection_solve(seg, 1e-9 * scale);
    const double cap = sol.diagnostics.at("upper_bound") + 1e-9 * scale;
    auto& box = nb.theta[t];
    box.hi = std::max(box.lo, std::min(box.hi, cap));
    box.lo = std::max(box.lo, 0.0);
    if (box.lo > box.hi) box.lo = box.hi;
  }
}

/// c_y y + c_theta theta + c_z z <= rhs.
struct McCormickRow {
  double cy = 0.0;
  double ctheta = 0.0;
  double cz = 0.0;
  double rhs = 0.0;
};

/// Envelope of y = theta z over the box: two under- and two over-estimators.
inline std::array<McCormickRow, 4> mccormick(Interval theta, Interval z) {
  return {{
      {-1.0, z.lo, theta.lo, theta.lo * z.lo},    // y >= th_lo z + z_lo th - th_lo z_lo
      {-1.0, z.hi, theta.hi, theta.hi * z.hi},    // y >= th_hi z + z_hi th - th_hi z_hi
      {1.0, -z.lo, -theta.hi, -theta.hi * z.lo},  // y <= th_hi z + z_lo th - th_hi z_lo
      {1.0, -z.hi, -theta.lo, -theta.lo * z.hi},  // y <= th_lo z + z_hi th - th_lo z_hi
  }};
}

struct BilinearViolation {
  double delta_max = 0.0;
  std::size_t t_star = 0;
};

/// max_t |y_t - theta_t z_t| with the lowest index on ties.
inline BilinearViolation bilinear_violation(std::span<const double> y, std::span<const double> theta,
                                            std::span<const double> z) {
  if (y.size() != theta.size() || y.size() != z.size()) throw InvalidInput("bilinear_violation: size mismatch");
  BilinearViolation out;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const double v = std::abs(y[t] - theta[t] * z[t]);
    if (v > out.delta_max) {
      out.delta_max = v;
      out.t_star = t;
    }
  }
  return out;
}

struct BranchResult {
  NodeBounds low;
  NodeBounds high;
  std::size_t t = 0;
  bool on_theta = true;
  double split = 0.0;
};

/// Bisects the wider of theta_t / z_t (theta on ties) at its midpoint.
inline BranchResult branch(const NodeBounds& node, std::size_t t) {
  if (t >= node.theta.size()) throw InvalidInput("branch: segment out of range");
  const double wt = node.theta[t].width();
  const double wz = node.z[t].width();
  if (wt < 1e-12 && wz < 1e-12) throw NumericFailure("branch: both candidate boxes are below 1e-12");
  BranchResult res;
  res.t = t;
  res.on_theta = wt >= wz;
  res.low = node;
  res.high = node;
  auto& box_lo = res.on_theta ? res.low.theta[t] : res.low.z[t];
  auto& box_hi = res.on_theta ? res.high.theta[t] : res.high.z[t];
  res.split = 0.5 * (box_lo.lo + box_lo.hi);
  box_lo.hi = res.split;
  box_hi.lo = res.split;
  return res;
}

/// One convex program per search; node boxes and McCormick rows are rewritten in place.
class NodeRelaxation {
 public:
  NodeRelaxation(const PricingInstance& inst, const RootBounds& root) : inst_(inst) {
    const std::size_t m = inst.m;
    const bool need_v = !inst.capacity.empty();
    for (std::size_t i = 0; i < m; ++i) {
      const auto tag = std::to_string(i);
      u_.push_back(prog_.add_variable("u" + tag, root.u[i].lo, root.u[i].hi));
      s_.push_back(prog_.add_variable("s" + tag, root.s[i].lo, root.s[i].hi));
      prog_.add_entropy_epigraph(s_.back(), u_.back());
      if (need_v) {
        v_.push_back(prog_.add_variable("v" + tag, root.v[i].lo, root.v[i].hi));
        prog_.add_log_hypograph(v_.back(), u_.back());
      }
    }
    for (std::size_t t = 0; t < inst.T; ++t) {
      const auto tag = std::to_string(t);
      y_.push_back(prog_.add_variable("y" + tag, root.y[t].lo, root.y[t].hi));
      z_.push_back(prog_.add_variable("z" + tag, root.node.z[t].lo, root.node.z[t].hi));
      theta_.push_back(prog_.add_variable("theta" + tag, root.node.theta[t].lo, root.node.theta[t].hi));
      prog_.set_linear_objective(theta_.back(), inst.d[t]);
      // y_t + sum_i (e^{a_ti} / b_i) s_i <= 0
      std::vector<convex::Term> num{{y_.back(), 1.0}};
      // sum_j e^{a_tj} u_j - z_t <= -1
      std::vector<convex::Term> den{{z_.back(), -1.0}};
      for (std::size_t i = 0; i < m; ++i) {
        const double ea = std::exp(inst.intercept(t, i));
        num.push_back({s_[i], ea / inst.b[i]});
        den.push_back({u_[i], ea});
      }
      prog_.add_linear(std::move(num), 0.0);
      prog_.add_linear(std::move(den), -1.0);
    }
    // sum_i (alpha_i / b_i)(-v_i) <= beta
    for (const auto& row : inst.capacity) {
      std::vector<convex::Term> terms;
      for (std::size_t i = 0; i < m; ++i)
        if (row.alpha[i] != 0.0) terms.push_back({v_[i], -row.alpha[i] / inst.b[i]});
      prog_.add_linear(std::move(terms), row.beta);
    }
    for (const auto& row : pairwise_to_u(inst, Transform::fmnl))
      prog_.add_linear({{u_[row.upper], 1.0}, {u_[row.lower], -row.factor}}, 0.0);
    for (std::size_t t = 0; t < inst.T; ++t)
      for (int k = 0; k < 4; ++k) mc_rows_.push_back(prog_.add_linear({}, 0.0));
    set_bounds(root.node);
  }

  void set_bounds(const NodeBounds& nb) {
    for (std::size_t t = 0; t < inst_.T; ++t) {
      prog_.update_box(theta_[t], nb.theta[t].lo, nb.theta[t].hi);
      prog_.update_box(z_[t], nb.z[t].lo, nb.z[t].hi);
      const auto rows = mccormick(nb.theta[t], nb.z[t]);
      for (int k = 0; k < 4; ++k) {
        const auto& r = rows[k];
        prog_.set_linear(mc_rows_[4 * t + k], {{y_[t], r.cy}, {theta_[t], r.ctheta}, {z_[t], r.cz}}, r.rhs);
      }
    }
  }

  convex::SolveOutcome solve(double tol) {
    convex::SolveOptions opts;
    opts.tol = tol;
    return convex::solve(prog_, opts);
  }

  [[nodiscard]] std::vector<double> pick(const std::vector<double>& point, const std::vector<convex::VarId>& ids) const {
    std::vector<double> out;
    out.reserve(ids.size());
    for (auto id : ids) out.push_back(point[id]);
    return out;
  }

  [[nodiscard]] const std::vector<convex::VarId>& u_ids() const { return u_; }
  [[nodiscard]] const std::vector<convex::VarId>& y_ids() const { return y_; }
  [[nodiscard]] const std::vector<convex::VarId>& z_ids() const { return z_; }
  [[nodiscard]] const std::vector<convex::VarId>& theta_ids() const { return theta_; }
  [[nodiscard]] const std::vector<convex::VarId>& s_ids() const { return s_; }
  [[nodiscard]] const std::vector<convex::VarId>& v_ids() const { return v_; }
  convex::ConvexProgram& program() { return prog_; }

 private:
  const PricingInstance& inst_;
  convex::ConvexProgram prog_;
  std::vector<convex::VarId> u_, s_, v_, y_, z_, theta_;
  std::vector<convex::RowId> mc_rows_;
};

/// Standalone relaxation over the given node box.
inline convex::ConvexProgram build_node_relaxation(const PricingInstance& inst, const NodeBounds& bounds) {
  NodeRelaxation relax(inst, init_global_bounds(inst));
  relax.set_bounds(bounds);
  return relax.program();
}

struct BnBOptions {
  double eps = 1e-2;
  double time_limit = 120.0;  // seconds
  std::string trace_path;     // per-node CSV when non-empty
  bool polish = true;         // 20 projected-gradient steps on each new incumbent
  std::size_t max_nodes = 1'000'000;
  bool tighten_root = true;   // cap theta_t by the single-segment box optimum
};

struct BnBStats {
  std::size_t nodes_explored = 0;  // relaxations solved
  std::size_t nodes_pruned_bound = 0;
  std::size_t nodes_pruned_infeasible = 0;
  std::size_t nodes_closed_delta = 0;
  std::size_t nodes_stalled = 0;
  std::size_t numeric_failures = 0;
  std::size_t max_depth = 0;
  double best_ub = 0.0;
  double best_lb = 0.0;
  double wall_time = 0.0;
  double polish_gain = 0.0;
};

struct BnBResult {
  Solution solution;
  BnBStats stats;
  std::vector<double> popped_ub;          // node bound at each pop, in order
  std::vector<double> incumbent_history;  // revenue after each incumbent change
  std::vector<PriceVector> incumbent_prices;  // prices after each incumbent change
};

namespace bnb_detail {

struct Node {
  NodeBounds bounds;
  double ub = 0.0;
  std::size_t depth = 0;
  std::size_t id = 0;
  bool has_point = false;
  std::vector<double> y, theta, z;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.ub != b.ub) return a.ub < b.ub;
    return a.id > b.id;
  }
};

}  // namespace bnb_detail

inline BnBResult solve_bnb(const PricingInstance& inst, const BnBOptions& opts) {
  using namespace bnb_detail;
  using Clock = std::chrono::steady_clock;
  if (!(opts.eps > 0.0)) throw InvalidInput("eps must be positive");
  if (!(opts.time_limit > 0.0)) throw InvalidInput("time limit must be positive");
  inst.validate();
  const auto started = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - started).count(); };

  BnBResult res;
  auto& st = res.stats;
  std::ofstream trace;
  if (!opts.trace_path.empty()) {
    trace.open(opts.trace_path);
    if (!trace) throw std::runtime_error("cannot write trace file " + opts.trace_path);
    trace << "node_id,depth,ub,delta_max,branch_var\n" << std::setprecision(17);
  }

  PriceVector best_p = feasible_point(inst);
  double best_lb = -std::numeric_limits<double>::infinity();
  LocalSearchConfig polish_cfg;
  polish_cfg.max_iters = 20;
  auto offer = [&](PriceVector p) {
    double r = revenue(inst, p);
    if (r <= best_lb) return;
    if (opts.polish) {
      auto polished = gradient_local_search(inst, p, polish_cfg);
      if (polished.revenue > r) {
        st.polish_gain += polished.revenue - r;
        p = std::move(polished.prices);
        r = polished.revenue;
      }
    }
    best_p = std::move(p);
    best_lb = r;
    res.incumbent_history.push_back(r);
    res.incumbent_prices.push_back(best_p);
  };
  offer(best_p);
  auto threshold = [&] { return best_lb + opts.eps * std::max(1.0, std::abs(best_lb)); };

  RootBounds root = init_global_bounds(inst);
  if (opts.tighten_root) tighten_theta_bounds(inst, root.node);
  double scale = 1.0;
  for (double u : inst.U) scale = std::max(scale, u);
  const double tol = std::min(1e-8, opts.eps / 10.0) * scale;
  NodeRelaxation relax(inst, root);
  std::size_t next_id = 0;

  auto evaluate = [&](const NodeBounds& bounds, double parent_ub, std::size_t depth) -> std::optional<Node> {
    Node node;
    node.bounds = bounds;
    node.ub = parent_ub;
    node.depth = depth;
    node.id = next_id++;
    relax.set_bounds(bounds);
    auto out = relax.solve(tol);
    if (out.status != convex::Status::optimal && out.status != convex::Status::infeasible) {
      relax.program().clear_warm_start();
      out = relax.solve(tol);
    }
    ++st.nodes_explored;
    st.max_depth = std::max(st.max_depth, depth);
    if (out.status == convex::Status::infeasible) {
      ++st.nodes_pruned_infeasible;
      return std::nullopt;
    }
    if (out.status != convex::Status::optimal) {
      ++st.numeric_failures;
      return node;
    }
    node.ub = std::min(parent_ub, out.dual_bound);
    node.has_point = true;
    node.y = relax.pick(out.point, relax.y_ids());
    node.theta = relax.pick(out.point, relax.theta_ids());
    node.z = relax.pick(out.point, relax.z_ids());
    auto p_hat = clip_to_box(inst, fmnl_untransform(inst, relax.pick(out.point, relax.u_ids())));
    if (!is_feasible(inst, p_hat, kDefaultFeasibilityTol)) p_hat = project_prices(inst, p_hat);
    offer(std::move(p_hat));
    return node;
  };

  std::priority_queue<Node, std::vector<Node>, NodeOrder> queue;
  double closed_ub = -std::numeric_limits<double>::infinity();
  auto root_node = evaluate(root.node, std::numeric_limits<double>::infinity(), 0);
  if (!root_node) throw NumericFailure("root relaxation reported infeasible on a nonempty polytope");
  if (!root_node->has_point) root_node->ub = std::numeric_limits<double>::infinity();
  queue.push(std::move(*root_node));

  SolveStatus status = SolveStatus::eps_optimal;
  while (!queue.empty()) {
    if (elapsed() > opts.time_limit || st.nodes_explored >= opts.max_nodes) {
      status = SolveStatus::time_limit;
      break;
    }
    Node node = queue.top();
    queue.pop();
    res.popped_ub.push_back(node.ub);
    auto log = [&](double delta, const std::string& action) {
      if (trace) trace << node.id << ',' << node.depth << ',' << node.ub << ',' << delta << ',' << action << '\n';
    };
    if (node.ub <= threshold()) {
      // Every queued bound is at most this one.
      st.nodes_pruned_bound += 1 + queue.size();
      closed_ub = std::max(closed_ub, node.ub);
      log(std::numeric_limits<double>::quiet_NaN(), "prune_bound");
      queue = {};
      break;
    }
    BilinearViolation viol;
    if (node.has_point) {
      viol = bilinear_violation(node.y, node.theta, node.z);
      double weight = 0.0;
      for (std::size_t t = 0; t < inst.T; ++t) weight += inst.d[t] / node.bounds.z[t].lo;
      if (viol.delta_max * weight <= opts.eps * std::max(1.0, std::abs(best_lb))) {
        ++st.nodes_closed_delta;
        closed_ub = std::max(closed_ub, node.ub);
        log(viol.delta_max, "close_delta");
        continue;
      }
    } else {
      viol.delta_max = std::numeric_limits<double>::quiet_NaN();
      for (std::size_t t = 1; t < inst.T; ++t)
        if (node.bounds.theta[t].width() > node.bounds.theta[viol.t_star].width()) viol.t_star = t;
    }
    BranchResult br;
    try {
      br = branch(node.bounds, viol.t_star);
    } catch (const NumericFailure&) {
      ++st.nodes_stalled;
      closed_ub = std::max(closed_ub, node.ub);
      log(viol.delta_max, "stall");
      continue;
    }
    log(viol.delta_max, (br.on_theta ? "theta_" : "z_") + std::to_string(br.t));
    for (const NodeBounds* child : {&br.low, &br.high}) {
      auto c = evaluate(*child, node.ub, node.depth + 1);
      if (!c) continue;
      if (c->ub <= threshold()) {
        ++st.nodes_pruned_bound;
        closed_ub = std::max(closed_ub, c->ub);
        continue;
      }
      queue.push(std::move(*c));
    }
  }

  double best_ub = std::max(best_lb, closed_ub);
  if (!queue.empty()) best_ub = std::max(best_ub, queue.top().ub);
  const double gap = std::max(0.0, best_ub - best_lb) / std::max(1.0, std::abs(best_lb));
  if (status == SolveStatus::eps_optimal && gap > opts.eps) status = SolveStatus::feasible_heuristic;

  st.best_ub = best_ub;
  st.best_lb = best_lb;
  st.wall_time = elapsed();
  auto& sol = res.solution;
  sol.prices = best_p;
  sol.revenue = best_lb;
  sol.status = status;
  sol.gap = gap;
  sol.diagnostics["nodes"] = static_cast<double>(st.nodes_explored);
  sol.diagnostics["nodes_pruned_bound"] = static_cast<double>(st.nodes_pruned_bound);
  sol.diagnostics["nodes_pruned_infeasible"] = static_cast<double>(st.nodes_pruned_infeasible);
  sol.diagnostics["nodes_closed_delta"] = static_cast<double>(st.nodes_closed_delta);
  sol.diagnostics["nodes_stalled"] = static_cast<double>(st.nodes_stalled);
  sol.diagnostics["numeric_failures"] = static_cast<double>(st.numeric_failures);
  sol.diagnostics["max_depth"] = static_cast<double>(st.max_depth);
  sol.diagnostics["upper_bound"] = best_ub;
  sol.diagnostics["polish_gain"] = st.polish_gain;
  sol.diagnostics["wall_time"] = st.wall_time;
  if (st.nodes_explored >= opts.max_nodes) sol.diagnostics["node_cap_hit"] = 1.0;
  return res;
}

inline BnBResult solve_bnb(const PricingInstance& inst, double eps, double time_limit) {
  BnBOptions opts;
  opts.eps = eps;
  opts.time_limit = time_limit;
  return solve_bnb(inst, opts);
}

}  // namespace logitprice
