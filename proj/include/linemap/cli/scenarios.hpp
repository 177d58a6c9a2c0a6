#pragma once

#include <optional>

#include "linemap/cli/config.hpp"
#include "linemap/cli/report.hpp"
#include "linemap/transport.hpp"

namespace linemap::cli {

struct RunResult {
  Report report;
  std::optional<Trajectory> trajectory;  // exported with --csv when present
};

// Numeric failures become failing checks; config problems throw config errors.
RunResult run(const ScenarioConfig& config);

}  // namespace linemap::cli
