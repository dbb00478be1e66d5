#pragma once

// Subcommands behind the command-line tool. Each writes its artifacts under
// RunConfig::out together with run_config.txt, a key = value echo that
// reproduces the run when passed back through --config.
//
//   simulate: series.csv (t, x, y, regime), spec.json
//   train:    model.json (or `checkpoint`), epochs.csv, summary.json
//   eval:     predictions.csv (t, y_true, y_pred, alpha_1..alpha_K),
//             metrics.json, levels.csv for raw price data
//   sweep:    sweep.csv, sweep_best.json
//
// Errors propagate as exceptions; ConfigError marks usage problems.

#include "mrnn/evalio.hpp"
#include "mrnn/run_config.hpp"
#include "mrnn/series.hpp"

#include <optional>
#include <string>

namespace mrnn {

struct RunData {
    SeriesBundle series;  // split 60/20/20
    std::optional<DifferencedDaily> levels;  // raw price input only
    std::string source;
};

// Series CSV as written by simulate: t, x or x_1..x_n, y or y_1..y_m and an
// optional regime column.
SeriesBundle read_series_csv(const std::string& path);
void write_series_csv(const SeriesBundle& series, const std::string& path);

// Synthetic data from the spec, a series CSV, or raw timestamp/value rows
// that go through daily aggregation and differencing.
RunData load_run_data(const RunConfig& config);

void cmd_simulate(const RunConfig& config);
void cmd_train(const RunConfig& config);
void cmd_eval(const RunConfig& config);
void cmd_sweep(const RunConfig& config);

}  // namespace mrnn
