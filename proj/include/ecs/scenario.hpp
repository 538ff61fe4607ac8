#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"

namespace ecs {

inline constexpr int kReportSchemaVersion = 1;

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides the scenario seed
  int parallel = 1;
  std::string csv_dir;                // empty: no CSV output
  double tol_scale = 1.0;             // ECS_LAB_TOL_SCALE
};

// 0 all checks pass, 1 some check failed, 2 scenario rejected, 3 runtime failure.
struct RunOutcome {
  int exit_code = 0;
  nlohmann::json report;
  std::string diagnostic;
};

RunOutcome run_scenario(const nlohmann::json& scenario, const RunOptions& opt);
RunOutcome run_scenario_text(const std::string& text, const RunOptions& opt);

// Reads ECS_LAB_TOL_SCALE; nullopt when unset. Throws on malformed values.
std::optional<double> tol_scale_from_env();

}  // namespace ecs
