// Command-line front end.
//   logitprice gen    --m M --T T --mode U|C|CP --seed S --out FILE
//   logitprice solve  --instance FILE --method NAME [--eps E] [--time-limit S] [--trace FILE] [--dump-program FILE]
//   logitprice oracle --instance FILE --points N [--refine R] [--workers W]
//   logitprice sweep  --config FILE
//   logitprice report --records FILE --out-dir DIR
// Exit codes: 0 success, 1 infeasible, 2 invalid input, 3 internal failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "logitprice/logitprice.hpp"

using namespace logitprice;

namespace {

constexpr int kOk = 0;
constexpr int kInfeasible = 1;
constexpr int kInvalid = 2;
constexpr int kInternal = 3;

nlohmann::json solution_json(const std::string& method, const Solution& sol) {
  nlohmann::json j;
  j["method"] = method;
  j["status"] = std::string(to_string(sol.status));
  j["revenue"] = sol.revenue;
  j["gap"] = sol.gap;
  j["prices"] = sol.prices;
  j["diagnostics"] = sol.diagnostics;
  return j;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

int cmd_gen(std::size_t m, std::size_t T, const std::string& mode, std::uint64_t seed, const std::string& out) {
  auto gen = generate_instance_logged(m, T, parse_mode(mode), seed);
  save_instance(gen.instance, out);
  std::cerr << "wrote " << out << " (resamples: " << gen.resamples << ")\n";
  return kOk;
}

int cmd_solve(const std::string& path, const std::string& method, double eps, double time_limit,
              const std::string& trace, const std::string& dump) {
  const auto inst = load_instance(path);
  if (!(eps > 0.0)) throw InvalidInput("eps must be positive");
  if (!(time_limit > 0.0)) throw InvalidInput("time limit must be positive");
  if (!trace.empty() && method != "bnb") throw InvalidInput("--trace applies to method bnb only");
  if (!dump.empty()) {
    if (method == "bnb") {
      RootBounds root = init_global_bounds(inst);
      tighten_theta_bounds(inst, root.node);
      write_file(dump, build_node_relaxation(inst, root.node).dump());
    } else if (method == "bisection") {
      Subproblem sp(inst);
      const auto iv = init_theta_interval(inst);
      sp.solve(0.5 * (iv.theta_min + iv.theta_max), 1e-8);
      write_file(dump, sp.program().dump());
    } else {
      throw InvalidInput("--dump-program applies to methods bnb and bisection");
    }
  }
  Solution sol;
  if (method == "bnb") {
    BnBOptions opts;
    opts.eps = eps;
    opts.time_limit = time_limit;
    opts.trace_path = trace;
    sol = solve_bnb(inst, opts).solution;
  } else if (method == "bisection") {
    sol = bisection_solve(inst, eps);
  } else {
    auto run = run_method(method, inst, eps, time_limit, inst.seed.value_or(0));
    sol = run.solution;
    if (run.nodes) sol.diagnostics["nodes"] = static_cast<double>(*run.nodes);
  }
  std::cout << solution_json(method, sol).dump(2) << '\n';
  return sol.status == SolveStatus::infeasible ? kInfeasible : kOk;
}

int cmd_oracle(const std::string& path, double points, int rounds, unsigned workers) {
  const auto sol = oracle_solve(load_instance(path), points, rounds, workers);
  std::cout << solution_json("oracle", sol).dump(2) << '\n';
  return kOk;
}

int cmd_sweep(const std::string& path) {
  const auto config = load_config(path);
  const auto rows = run_sweep(config);
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.status == "failed";
  std::cerr << "wrote " << rows.size() << " rows to " << config.output_dir << "/records.csv (" << failed
            << " failed)\n";
  return kOk;
}

int cmd_report(const std::string& records, const std::string& out_dir) {
  const auto rows = read_records(records);
  for (const auto& file : emit_report(rows, out_dir)) std::cerr << "wrote " << file << '\n';
  const double rho = nodes_time_correlation(rows);
  if (std::isfinite(rho)) std::cerr << "nodes/time Spearman rho: " << rho << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Price optimization under logit and mixed-logit demand"};
  app.require_subcommand(1);

  std::size_t m = 0, T = 0;
  std::string mode, out;
  std::uint64_t seed = 0;
  auto* gen = app.add_subcommand("gen", "generate a random instance");
  gen->add_option("--m", m, "number of products")->required();
  gen->add_option("--T", T, "number of segments")->required();
  gen->add_option("--mode", mode, "U, C or CP")->required();
  gen->add_option("--seed", seed, "seed")->required();
  gen->add_option("--out", out, "instance JSON path")->required();

  std::string instance, method, trace, dump;
  double eps = 1e-2, time_limit = 120.0;
  auto* solve = app.add_subcommand("solve", "solve an instance");
  solve->add_option("--instance", instance, "instance JSON")->required();
  solve->add_option("--method", method, "bisection, bnb, gradient, project_unconstrained or aggregate")
      ->required()
      ->check(CLI::IsMember(known_methods()));
  solve->add_option("--eps", eps, "accuracy");
  solve->add_option("--time-limit", time_limit, "seconds");
  solve->add_option("--trace", trace, "B&B node trace CSV");
  solve->add_option("--dump-program", dump, "write the root convex program");

  double points = 1e6;
  int rounds = 0;
  unsigned workers = 1;
  auto* orc = app.add_subcommand("oracle", "grid-search ground truth (m <= 4)");
  orc->add_option("--instance", instance, "instance JSON")->required();
  orc->add_option("--points", points, "total grid points")->required();
  orc->add_option("--refine", rounds, "refinement rounds");
  orc->add_option("--workers", workers, "threads");

  std::string config;
  auto* sweep = app.add_subcommand("sweep", "run an experiment sweep");
  sweep->add_option("--config", config, "ExperimentConfig JSON")->required();

  std::string records, out_dir;
  auto* report = app.add_subcommand("report", "tables and plots from a records CSV");
  report->add_option("--records", records, "records CSV")->required();
  report->add_option("--out-dir", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*gen) return cmd_gen(m, T, mode, seed, out);
    if (*solve) return cmd_solve(instance, method, eps, time_limit, trace, dump);
    if (*orc) return cmd_oracle(instance, points, rounds, workers);
    if (*sweep) return cmd_sweep(config);
    if (*report) return cmd_report(records, out_dir);
  } catch (const Infeasible& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const GenerationFailure& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const NoFeasibleGridPoint& e) {
    std::cerr << "infeasible on grid: " << e.what() << '\n';
    return kInfeasible;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "internal failure: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}
