#pragma once

#include "mflow/config.hpp"
#include "mflow/report.hpp"

namespace mflow {

// Dispatch into the math modules: analyze-graph, pressure, measure,
// classify, mixing-report, dbar.
Report run_command(const AnalysisConfig& cfg, const std::string& command);

} // namespace mflow
