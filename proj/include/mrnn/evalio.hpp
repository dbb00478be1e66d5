#pragma once

// Data preparation and experiment-protocol helpers: CSV ingestion, daily
// aggregation, first-order differencing, chronological splits,
// standardization, least-squares calibration and error metrics.

#include "mrnn/linalg.hpp"
#include "mrnn/series.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mrnn {

struct RawSeries {
    std::vector<double> timestamps;  // seconds since the Unix epoch, UTC
    std::vector<double> values;
    std::string source;
};

struct CsvSchema {
    std::string timestamp_column = "timestamp";
    std::string value_column = "value";
};

// Accepts ISO-8601 ("2020-01-24", "2020-01-24T13:00:00Z", "2020-01-24 13:00")
// or a plain number of epoch seconds.
double parse_timestamp(const std::string& text);

RawSeries load_csv(const std::string& path, const CsvSchema& schema);

struct DailyFeatures {
    std::vector<std::int64_t> days;  // days since the epoch
    std::vector<double> mean;
    std::vector<double> stddev;      // population convention
    std::size_t skipped_days = 0;    // calendar days without samples
};

DailyFeatures daily_aggregate(const RawSeries& raw);

// x_t = (mean_t, std_t), y_t = mean_{t+1}.
SeriesBundle daily_bundle(const DailyFeatures& daily);

struct Differenced {
    std::vector<double> diffs;
    double anchor = 0.0;
};

Differenced difference(const std::vector<double>& series);
std::vector<double> reconstruct(const std::vector<double>& diffs, double anchor);

// Differenced daily pipeline. Row i has x = (mean_{i+1} - mean_i, std_{i+1})
// (or the differenced std when difference_all is set) and
// y = mean_{i+2} - mean_{i+1}; level_base[i] = mean_{i+1}, so a predicted
// difference maps back to the level as level_base[i] + y_hat.
struct DifferencedDaily {
    SeriesBundle bundle;
    std::vector<double> level_base;
    std::vector<double> level_target;
};

DifferencedDaily differenced_daily_bundle(const DailyFeatures& daily, bool difference_all = false);

// Contiguous floor(0.6 T) / floor(0.8 T) boundaries.
Split split_60_20_20(std::size_t length);
SeriesBundle split_60_20_20(SeriesBundle bundle);

struct Calibration {
    double slope = 1.0;
    double intercept = 0.0;
    bool intercept_only = false;
};

Calibration fit_calibration(const std::vector<double>& predictions, const std::vector<double>& targets);
std::vector<double> apply_calibration(const Calibration& cal, const std::vector<double>& predictions);

// Per-channel affine standardization fitted on a training prefix.
struct Scaler {
    Vector input_mean, input_scale;
    Vector target_mean, target_scale;

    static Scaler fit(const SeriesBundle& bundle, std::size_t fit_end);
    static Scaler identity(int feature_dim, int output_dim);
    SeriesBundle transform(const SeriesBundle& bundle) const;
    Vector transform_input(const Vector& x) const;
    Vector inverse_target(const Vector& y) const;
};

struct ErrorMetrics {
    double rmse = 0.0;  // sqrt(mean e^T e)
    double mae = 0.0;   // mean |e| over all coordinates
};

ErrorMetrics compute_metrics(const std::vector<Vector>& predictions, const std::vector<Vector>& targets);
ErrorMetrics compute_metrics(const std::vector<double>& predictions, const std::vector<double>& targets);

}  // namespace mrnn
