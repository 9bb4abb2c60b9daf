#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fatkpp/config.hpp"

namespace fatkpp {

struct ExperimentResult {
  std::string directory;
  std::vector<std::string> files;                       // written, in order, run.json last
  std::vector<std::pair<std::string, double>> metrics;  // headline numbers, also in run.json
};

using ProgressFn = std::function<void(const std::string&)>;

/// Runs the configured experiment and writes its CSVs, SVGs (when
/// output.plot) and run.json into `directory`, created if needed. Data files
/// depend only on the config; run.json also records wall times and a
/// timestamp. A run that aborts (boundary contamination, instability) still
/// writes what it produced plus run.json before the error propagates.
ExperimentResult run_experiment(const RunConfig& config, const std::string& directory,
                                const ProgressFn& progress = {});

/// File-name form of a time or eps value: "%.6g" ("0.5", "30", "1e-05").
std::string compact_number(double value);

}  // namespace fatkpp
