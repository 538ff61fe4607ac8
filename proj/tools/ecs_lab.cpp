// ecs-lab: run a JSON scenario and write a JSON report.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ecs/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for rank-one ECS model manifolds"};
  std::string scenario_path, report_path, csv_dir;
  std::uint64_t seed = 0;
  int parallel = 1;
  app.add_option("--scenario", scenario_path, "scenario JSON file")->required();
  app.add_option("--report", report_path, "report JSON file (default: stdout)");
  auto* seed_opt = app.add_option("--seed", seed, "override the scenario seed");
  app.add_option("--csv", csv_dir, "directory for per-task CSV files");
  app.add_option("--parallel", parallel, "tasks run concurrently")->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  ecs::RunOptions opt;
  opt.parallel = parallel;
  opt.csv_dir = csv_dir;
  if (*seed_opt) opt.seed = seed;
  try {
    if (auto s = ecs::tol_scale_from_env()) opt.tol_scale = *s;
  } catch (const std::exception& e) {
    std::cerr << "ecs-lab: " << e.what() << "\n";
    return 2;
  }

  std::ifstream in(scenario_path);
  if (!in) {
    std::cerr << "ecs-lab: cannot open " << scenario_path << "\n";
    return 2;
  }
  std::stringstream buf;
  buf << in.rdbuf();

  ecs::RunOutcome out;
  try {
    out = ecs::run_scenario_text(buf.str(), opt);
  } catch (const std::exception& e) {
    std::cerr << "ecs-lab: " << e.what() << "\n";
    return 3;
  }

  const std::string text = out.report.dump(2) + "\n";
  if (report_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(report_path);
    if (!f) {
      std::cerr << "ecs-lab: cannot write " << report_path << "\n";
      return 3;
    }
    f << text;
  }
  if (!out.diagnostic.empty()) std::cerr << "ecs-lab: " << out.diagnostic << "\n";
  return out.exit_code;
}
