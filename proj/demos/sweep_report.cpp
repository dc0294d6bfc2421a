// A small constrained sweep written to ./demo_sweep, followed by the report.

#include <cstdio>

#include "logitprice/logitprice.hpp"

using namespace logitprice;

int main(int argc, char** argv) {
  ExperimentConfig config;
  config.m = {2, 4};
  config.T = {1, 2};
  config.modes = {ConstraintMode::CP};
  config.instances_per_cell = 3;
  config.eps = 1e-2;
  config.time_limit = 30.0;
  config.methods = {"bnb", "gradient", "aggregate"};
  config.seed = 7;
  config.output_dir = argc > 1 ? argv[1] : "demo_sweep";

  const auto rows = run_sweep(config);
  for (const auto& r : rows)
    std::printf("%s m=%zu T=%zu #%zu %-10s %-18s %.5f\n", r.mode.c_str(), r.m, r.T, r.instance, r.method.c_str(),
                r.status.c_str(), r.revenue.value_or(0.0));
  for (const auto& path : emit_report(rows, config.output_dir + "/report")) std::printf("wrote %s\n", path.c_str());
  return 0;
}
