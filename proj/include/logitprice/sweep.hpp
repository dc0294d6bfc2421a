#pragma once

// Experiment sweeps: config parsing, per-instance method runs, records CSV.
//
// Records CSV header (fixed):
//   mode,m,T,instance,seed,method,status,revenue,gap,wall_time,nodes,prices
// mode        U, C or CP
// instance    index within the cell, 0-based
// seed        instance seed passed to generate_instance
// status      a SolveStatus name, "skipped" (method not applicable) or "failed"
// revenue     revenue() at the recorded prices, %.17g; empty when skipped/failed
// gap         bisection/bnb: own certified relative gap; other methods:
//             max(0, UB - revenue) / max(1, |UB|) with UB the best certified upper
//             bound of bisection/bnb on the same instance; empty without one
// wall_time   seconds, the only timing column
// nodes       B&B nodes for bnb and project_unconstrained, else empty
// prices      ';'-separated, %.17g

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "logitprice/baselines.hpp"
#include "logitprice/bnb.hpp"
#include "logitprice/generator.hpp"
#include "logitprice/instance_io.hpp"
#include "logitprice/mnl.hpp"
#include "logitprice/polytope.hpp"

namespace logitprice {

inline const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> names{"bisection", "bnb", "gradient", "project_unconstrained", "aggregate"};
  return names;
}

struct ExperimentConfig {
  std::vector<std::size_t> m{2, 5, 10, 20};
  std::vector<std::size_t> T{1, 2, 3, 4};
  std::vector<ConstraintMode> modes{ConstraintMode::CP};
  std::size_t instances_per_cell = 5;
  double eps = 1e-2;
  double time_limit = 120.0;
  std::vector<std::string> methods{"bnb", "gradient"};
  std::uint64_t seed = 0;
  std::string output_dir = "results";
  unsigned workers = 1;

  void validate() const {
    if (m.empty() || T.empty() || modes.empty()) throw InvalidInput("config: m, T and constraint_mode must be nonempty");
    if (methods.empty()) throw InvalidInput("config: methods must be nonempty");
    for (auto v : m)
      if (v == 0) throw InvalidInput("config: m entries must be positive");
    for (auto v : T)
      if (v == 0) throw InvalidInput("config: T entries must be positive");
    if (instances_per_cell == 0) throw InvalidInput("config: instances_per_cell must be positive");
    if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidInput("config: eps must be positive");
    if (!(time_limit > 0.0)) throw InvalidInput("config: time_limit must be positive");
    if (workers == 0) throw InvalidInput("config: workers must be positive");
    for (const auto& name : methods)
      if (std::find(known_methods().begin(), known_methods().end(), name) == known_methods().end())
        throw InvalidInput("config: unknown method '" + name + "'");
  }
};

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  using io_detail::required;
  io_detail::reject_unknown(j,
                            {"m", "T", "constraint_mode", "instances_per_cell", "eps", "time_limit", "methods", "seed",
                             "output_dir", "workers"},
                            "config");
  ExperimentConfig c;
  c.m = required<std::vector<std::size_t>>(j, "m");
  c.T = required<std::vector<std::size_t>>(j, "T");
  const auto& mode = j.contains("constraint_mode") ? j.at("constraint_mode") : throw InvalidInput("missing field 'constraint_mode'");
  c.modes.clear();
  if (mode.is_string()) {
    c.modes.push_back(parse_mode(mode.get<std::string>()));
  } else if (mode.is_array()) {
    for (const auto& x : mode) {
      if (!x.is_string()) throw InvalidInput("bad field 'constraint_mode'");
      c.modes.push_back(parse_mode(x.get<std::string>()));
    }
  } else {
    throw InvalidInput("bad field 'constraint_mode'");
  }
  c.methods = required<std::vector<std::string>>(j, "methods");
  if (j.contains("instances_per_cell")) c.instances_per_cell = required<std::size_t>(j, "instances_per_cell");
  if (j.contains("eps")) c.eps = required<double>(j, "eps");
  if (j.contains("time_limit")) c.time_limit = required<double>(j, "time_limit");
  if (j.contains("seed")) c.seed = required<std::uint64_t>(j, "seed");
  if (j.contains("output_dir")) c.output_dir = required<std::string>(j, "output_dir");
  if (j.contains("workers")) c.workers = required<unsigned>(j, "workers");
  c.validate();
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

struct ResultRecord {
  std::string mode;
  std::size_t m = 0;
  std::size_t T = 0;
  std::size_t instance = 0;
  std::uint64_t seed = 0;
  std::string method;
  std::string status;
  std::optional<double> revenue;
  std::optional<double> gap;
  double wall_time = 0.0;
  std::optional<std::size_t> nodes;
  PriceVector prices;
};

inline constexpr const char* kRecordsHeader = "mode,m,T,instance,seed,method,status,revenue,gap,wall_time,nodes,prices";

namespace sweep_detail {

inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline int mode_rank(const std::string& mode) {
  if (mode == "U") return 0;
  if (mode == "C") return 1;
  if (mode == "CP") return 2;
  return 3;
}

inline int method_rank(const std::string& method) {
  const auto& names = known_methods();
  return static_cast<int>(std::find(names.begin(), names.end(), method) - names.begin());
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace sweep_detail

inline bool record_less(const ResultRecord& a, const ResultRecord& b) {
  using sweep_detail::method_rank;
  using sweep_detail::mode_rank;
  return std::make_tuple(mode_rank(a.mode), a.m, a.T, a.instance, method_rank(a.method), a.method) <
         std::make_tuple(mode_rank(b.mode), b.m, b.T, b.instance, method_rank(b.method), b.method);
}

inline void sort_records(std::vector<ResultRecord>& records) { std::stable_sort(records.begin(), records.end(), record_less); }

inline std::string format_record(const ResultRecord& r) {
  using sweep_detail::fmt17;
  std::ostringstream out;
  out << r.mode << ',' << r.m << ',' << r.T << ',' << r.instance << ',' << r.seed << ',' << r.method << ',' << r.status
      << ',';
  if (r.revenue) out << fmt17(*r.revenue);
  out << ',';
  if (r.gap) out << fmt17(*r.gap);
  char wall[32];
  std::snprintf(wall, sizeof wall, "%.6f", r.wall_time);
  out << ',' << wall << ',';
  if (r.nodes) out << *r.nodes;
  out << ',';
  for (std::size_t i = 0; i < r.prices.size(); ++i) out << (i ? ";" : "") << fmt17(r.prices[i]);
  return out.str();
}

inline ResultRecord parse_record(const std::string& line) {
  auto f = sweep_detail::split(line, ',');
  if (f.size() != 12) throw InvalidInput("records row has " + std::to_string(f.size()) + " fields, expected 12");
  ResultRecord r;
  try {
    r.mode = f[0];
    r.m = std::stoull(f[1]);
    r.T = std::stoull(f[2]);
    r.instance = std::stoull(f[3]);
    r.seed = std::stoull(f[4]);
    r.method = f[5];
    r.status = f[6];
    if (!f[7].empty()) r.revenue = std::stod(f[7]);
    if (!f[8].empty()) r.gap = std::stod(f[8]);
    r.wall_time = std::stod(f[9]);
    if (!f[10].empty()) r.nodes = std::stoull(f[10]);
    if (!f[11].empty())
      for (const auto& x : sweep_detail::split(f[11], ';')) r.prices.push_back(std::stod(x));
  } catch (const std::logic_error&) {
    throw InvalidInput("records row is malformed: " + line);
  }
  return r;
}

inline void write_records(const std::vector<ResultRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << kRecordsHeader << '\n';
  for (const auto& r : records) out << format_record(r) << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

inline std::vector<ResultRecord> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open records '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kRecordsHeader) throw InvalidInput("records file has an unexpected header");
  std::vector<ResultRecord> out;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(parse_record(line));
  return out;
}

/// Seed of instance k in cell (m, T, mode); independent of which other cells exist.
inline std::uint64_t instance_seed(std::uint64_t base, std::size_t m, std::size_t T, ConstraintMode mode, std::size_t k) {
  return stream_key({base, m, T, static_cast<std::uint64_t>(mode), k});
}

/// Copy with every coupling row dropped, leaving only the price box.
inline PricingInstance box_only(const PricingInstance& inst) {
  PricingInstance out = inst;
  out.capacity.clear();
  out.pairwise.clear();
  return out;
}

struct MethodRun {
  Solution solution;
  std::optional<std::size_t> nodes;
  std::optional<double> upper_bound;  // certified
  bool applicable = true;
};

/// Runs one named method; throws on failure.
inline MethodRun run_method(const std::string& method, const PricingInstance& inst, double eps, double time_limit,
                            std::uint64_t seed) {
  MethodRun run;
  if (method == "bisection") {
    if (inst.T != 1) {
      run.applicable = false;
      return run;
    }
    run.solution = bisection_solve(inst, eps);
    run.upper_bound = run.solution.diagnostics.at("upper_bound");
  } else if (method == "bnb") {
    auto res = solve_bnb(inst, eps, time_limit);
    run.solution = res.solution;
    run.nodes = res.stats.nodes_explored;
    run.upper_bound = res.stats.best_ub;
  } else if (method == "gradient") {
    LocalSearchConfig cfg;
    cfg.seed = seed;
    run.solution = multistart(inst, cfg);
  } else if (method == "project_unconstrained") {
    auto res = solve_bnb(box_only(inst), eps, time_limit);
    run.nodes = res.stats.nodes_explored;
    run.solution.prices = project_prices(inst, res.solution.prices);
    run.solution.status = SolveStatus::feasible_heuristic;
  } else if (method == "aggregate") {
    auto agg = aggregate_segments(inst);
    run.solution = bisection_solve(agg, eps);
    run.solution.status = SolveStatus::feasible_heuristic;
  } else {
    throw InvalidInput("unknown method '" + method + "'");
  }
  run.solution.revenue = revenue(inst, run.solution.prices);
  return run;
}

/// All method rows for one generated instance.
inline std::vector<ResultRecord> run_instance(const ExperimentConfig& config, std::size_t m, std::size_t T,
                                              ConstraintMode mode, std::size_t k) {
  const std::uint64_t seed = instance_seed(config.seed, m, T, mode, k);
  ResultRecord base;
  base.mode = std::string(to_string(mode));
  base.m = m;
  base.T = T;
  base.instance = k;
  base.seed = seed;
  std::vector<ResultRecord> rows;
  std::optional<PricingInstance> inst;
  try {
    inst = generate_instance(m, T, mode, seed);
  } catch (const std::exception&) {
  }
  std::optional<double> best_ub;
  std::vector<bool> certified;
  for (const auto& method : config.methods) {
    ResultRecord r = base;
    r.method = method;
    bool cert = false;
    if (!inst) {
      r.status = "failed";
    } else {
      const auto start = std::chrono::steady_clock::now();
      try {
        auto run = run_method(method, *inst, config.eps, config.time_limit, seed);
        if (!run.applicable) {
          r.status = "skipped";
        } else {
          r.status = std::string(to_string(run.solution.status));
          r.revenue = run.solution.revenue;
          r.prices = run.solution.prices;
          r.nodes = run.nodes;
          if (run.upper_bound) {
            cert = true;
            r.gap = run.solution.gap;
            best_ub = best_ub ? std::min(*best_ub, *run.upper_bound) : *run.upper_bound;
          }
        }
      } catch (const std::exception&) {
        r.status = "failed";
      }
      r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    certified.push_back(cert);
    rows.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (certified[i] || !rows[i].revenue || !best_ub) continue;
    rows[i].gap = std::max(0.0, *best_ub - *rows[i].revenue) / std::max(1.0, std::abs(*best_ub));
  }
  return rows;
}

/// Runs every cell x instance x method. Rows are appended to
/// <output_dir>/records.csv as instances finish and the file is rewritten
/// sorted at the end. Returns the sorted rows.
inline std::vector<ResultRecord> run_sweep(const ExperimentConfig& config) {
  config.validate();
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  const std::string path = (fs::path(config.output_dir) / "records.csv").string();
  std::ofstream sink(path, std::ios::trunc);
  if (!sink) throw std::runtime_error("output directory '" + config.output_dir + "' is not writable");
  sink << kRecordsHeader << '\n' << std::flush;

  struct Task {
    std::size_t m, T;
    ConstraintMode mode;
    std::size_t k;
  };
  std::vector<Task> tasks;
  for (auto mode : config.modes)
    for (auto m : config.m)
      for (auto T : config.T)
        for (std::size_t k = 0; k < config.instances_per_cell; ++k) tasks.push_back({m, T, mode, k});

  std::vector<ResultRecord> all;
  std::mutex lock;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      Task task;
      {
        std::lock_guard<std::mutex> guard(lock);
        if (next == tasks.size()) return;
        task = tasks[next++];
      }
      auto rows = run_instance(config, task.m, task.T, task.mode, task.k);
      std::lock_guard<std::mutex> guard(lock);
      for (auto& r : rows) {
        sink << format_record(r) << '\n';
        all.push_back(std::move(r));
      }
      sink.flush();
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(config.workers, static_cast<unsigned>(tasks.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  sink.close();
  sort_records(all);
  write_records(all, path);
  return all;
}

struct ProjectionRecord {
  std::size_t m = 0;
  std::size_t T = 0;
  std::size_t instance = 0;
  std::uint64_t seed = 0;
  double bnb_revenue = 0.0;  // best feasible value known: max(bnb incumbent, projected revenue)
  double projected_revenue = 0.0;
  double loss = 0.0;         // bnb_revenue - projected_revenue
  double improvement = 0.0;  // loss / max(1e-12, |projected_revenue|)
};

/// Constrained B&B against the projected box-only B&B optimum on every CP instance.
inline std::vector<ProjectionRecord> compare_projection(const ExperimentConfig& config) {
  config.validate();
  for (auto mode : config.modes)
    if (mode != ConstraintMode::CP) throw InvalidInput("compare_projection requires constraint_mode CP");
  ExperimentConfig c = config;
  c.methods = {"bnb", "project_unconstrained"};
  auto rows = run_sweep(c);
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::pair<const ResultRecord*, const ResultRecord*>> pairs;
  for (const auto& r : rows) {
    auto& slot = pairs[{r.m, r.T, r.instance}];
    (r.method == "bnb" ? slot.first : slot.second) = &r;
  }
  std::vector<ProjectionRecord> out;
  for (const auto& [key, pr] : pairs) {
    if (!pr.first || !pr.second || !pr.first->revenue || !pr.second->revenue) continue;
    ProjectionRecord p;
    std::tie(p.m, p.T, p.instance) = key;
    p.seed = pr.first->seed;
    p.projected_revenue = *pr.second->revenue;
    p.bnb_revenue = std::max(*pr.first->revenue, p.projected_revenue);
    p.loss = p.bnb_revenue - p.projected_revenue;
    p.improvement = p.loss / std::max(1e-12, std::abs(p.projected_revenue));
    out.push_back(p);
  }
  std::ofstream csv((std::filesystem::path(config.output_dir) / "projection.csv").string(), std::ios::trunc);
  csv << "m,T,instance,seed,bnb_revenue,projected_revenue,loss,improvement\n";
  for (const auto& p : out)
    csv << p.m << ',' << p.T << ',' << p.instance << ',' << p.seed << ',' << sweep_detail::fmt17(p.bnb_revenue) << ','
        << sweep_detail::fmt17(p.projected_revenue) << ',' << sweep_detail::fmt17(p.loss) << ','
        << sweep_detail::fmt17(p.improvement) << '\n';
  return out;
}

}  // namespace logitprice
