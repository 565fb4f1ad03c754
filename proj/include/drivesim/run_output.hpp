#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "drivesim/scenario_io.hpp"
#include "drivesim/sim_engine.hpp"

namespace drivesim {

struct OutputOptions {
  bool csv = true;
  bool plots = true;
};

/// Scenario fields with provenance, metrics, switching-row counts and any
/// divergence, as JSON.
std::string summary_json(const LoadedScenario& loaded, const RunResult& result);

/// Short human-readable summary.
std::string summary_text(const LoadedScenario& loaded, const RunResult& result);

/// Writes trace.csv, summary.json and the figures of one run into dir
/// (created if missing). Returns the files written.
std::vector<std::filesystem::path> write_run_outputs(
    const LoadedScenario& loaded, const RunResult& result,
    const std::filesystem::path& dir, const OutputOptions& opts);

}  // namespace drivesim
