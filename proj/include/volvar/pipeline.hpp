#pragma once

#include "volvar/config.hpp"
#include "volvar/error.hpp"

#include <string_view>

namespace volvar {

// Stages exchange data only through files under output_dir:
//
//   ingest    data_path                         -> daily.csv
//   stats     daily.csv                         -> stats.csv
//   fit       daily.csv                         -> models/*.json, tails/*.json
//   forecast  daily.csv, models/lstm_*.json     -> forecasts.csv
//   var       forecasts.csv, tails/*.json       -> var.csv, var_detail.csv
//   backtest  daily.csv, forecasts.csv,
//             var_detail.csv                    -> backtest.json, accuracy.json
//   report    backtest.json, accuracy.json      -> backtest_report.csv, accuracy_report.csv,
//                                                  improvement.csv, summary.txt
//
// Every stage then rewrites manifest.json with the checksums of what it read
// and wrote.
enum class Stage { Ingest, Stats, Fit, Forecast, Var, Backtest, Report, All };

inline constexpr Stage kPipelineStages[] = {Stage::Ingest,   Stage::Stats,    Stage::Fit,   Stage::Forecast,
                                            Stage::Var,      Stage::Backtest, Stage::Report};

std::string_view to_string(Stage stage);
Stage parse_stage(std::string_view name);

// Throws Error on failure.
void run_stage(const RunConfig& config, Stage stage);

// 2 for configuration and validation errors, 1 for everything else.
int exit_code(ErrorCode code);

// Runs the stage, logs any failure, and returns the process exit status.
int run(const RunConfig& config, Stage stage);

}  // namespace volvar
