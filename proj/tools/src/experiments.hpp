#pragma once

#include "config.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace curvebound::cli {

struct RunOptions {
    std::string out = ".";
    int threads = 1;
    bool dense_fallback = false;
};

enum ExitCode : int { exit_ok = 0, exit_validation = 2, exit_solver = 3 };

// Fixed CSV columns of an experiment kind.
std::vector<std::string> csv_columns(ExperimentKind kind);

// %.17g fields, comma separated, LF terminated, header first.
std::string format_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

nlohmann::json version_info();

// Runs the ladder, writes <out>/<name>.csv and <out>/<name>.json and prints
// one summary line per ladder point on `summary`. Validation errors leave no
// files; a solver failure flushes the rows finished before the failing point.
int run_experiment(const ExperimentConfig& config, const RunOptions& options, std::ostream& summary);

}  // namespace curvebound::cli
