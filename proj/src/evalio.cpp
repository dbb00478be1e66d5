#include "mrnn/evalio.hpp"

#include "mrnn/csv.hpp"
#include "mrnn/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace mrnn {

double parse_timestamp(const std::string& text) {
    const std::string s = trim(text);
    if (s.empty()) throw ConfigError("empty timestamp");
    if (s.find('-', 1) == std::string::npos) return parse_double(s);

    int y = 0, mo = 0, d = 0, h = 0, mi = 0;
    double sec = 0.0;
    int consumed = 0;
    if (std::sscanf(s.c_str(), "%d-%d-%d%n", &y, &mo, &d, &consumed) != 3)
        throw ConfigError("unrecognized timestamp '" + s + "'");
    std::string rest = s.substr(static_cast<std::size_t>(consumed));
    if (!rest.empty() && (rest[0] == 'T' || rest[0] == ' ')) {
        int used = 0;
        if (std::sscanf(rest.c_str() + 1, "%d:%d%n", &h, &mi, &used) != 2)
            throw ConfigError("unrecognized time of day in '" + s + "'");
        rest = rest.substr(static_cast<std::size_t>(used) + 1);
        if (!rest.empty() && rest[0] == ':') {
            std::size_t end = 1;
            while (end < rest.size() && (std::isdigit(static_cast<unsigned char>(rest[end])) || rest[end] == '.')) ++end;
            sec = parse_double(rest.substr(1, end - 1));
            rest = rest.substr(end);
        }
    }
    if (!(rest.empty() || rest == "Z" || rest == "+00:00"))
        throw ConfigError("unsupported timestamp suffix in '" + s + "'");

    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || sec < 0.0 || sec >= 61.0)
        throw ConfigError("invalid calendar timestamp '" + s + "'");
    const auto days = std::chrono::sys_days{ymd}.time_since_epoch().count();
    return static_cast<double>(days) * 86400.0 + h * 3600.0 + mi * 60.0 + sec;
}

RawSeries load_csv(const std::string& path, const CsvSchema& schema) {
    CsvTable table = read_csv(path);
    const auto ts_col = table.column_index(schema.timestamp_column);
    const auto val_col = table.column_index(schema.value_column);

    RawSeries raw;
    raw.source = path;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        double ts = 0.0, value = 0.0;
        try {
            ts = parse_timestamp(row.at(ts_col));
        } catch (const ConfigError& e) {
            throw IoError(path + ": row " + std::to_string(r + 1) + ", column '" + schema.timestamp_column +
                          "': " + e.what());
        }
        try {
            value = parse_double(row.at(val_col));
        } catch (const ConfigError& e) {
            throw IoError(path + ": row " + std::to_string(r + 1) + ", column '" + schema.value_column +
                          "': " + e.what());
        }
        if (!std::isfinite(value))
            throw IoError(path + ": row " + std::to_string(r + 1) + ": non-finite value");
        if (!raw.timestamps.empty() && !(ts > raw.timestamps.back()))
            throw IoError(path + ": row " + std::to_string(r + 1) +
                          ": timestamps must be strictly increasing (duplicate or out of order)");
        raw.timestamps.push_back(ts);
        raw.values.push_back(value);
    }
    return raw;
}

DailyFeatures daily_aggregate(const RawSeries& raw) {
    if (raw.values.empty()) throw ConfigError("cannot aggregate an empty series");
    std::map<std::int64_t, std::vector<double>> by_day;
    for (std::size_t i = 0; i < raw.values.size(); ++i)
        by_day[static_cast<std::int64_t>(std::floor(raw.timestamps[i] / 86400.0))].push_back(raw.values[i]);

    DailyFeatures out;
    std::int64_t prev_day = by_day.begin()->first;
    for (const auto& [day, samples] : by_day) {
        out.skipped_days += static_cast<std::size_t>(std::max<std::int64_t>(0, day - prev_day - 1));
        prev_day = day;
        double mean = 0.0;
        for (double v : samples) mean += v;
        mean /= static_cast<double>(samples.size());
        double var = 0.0;
        for (double v : samples) var += (v - mean) * (v - mean);
        var /= static_cast<double>(samples.size());
        out.days.push_back(day);
        out.mean.push_back(mean);
        out.stddev.push_back(std::sqrt(var));
    }
    return out;
}

SeriesBundle daily_bundle(const DailyFeatures& daily) {
    SeriesBundle b;
    for (std::size_t t = 0; t + 1 < daily.mean.size(); ++t) {
        Vector x(2);
        x << daily.mean[t], daily.stddev[t];
        b.inputs.push_back(x);
        b.targets.push_back(Vector::Constant(1, daily.mean[t + 1]));
    }
    return b;
}

Differenced difference(const std::vector<double>& series) {
    if (series.size() < 2) throw ConfigError("differencing needs at least two values");
    Differenced d;
    d.anchor = series.front();
    d.diffs.reserve(series.size() - 1);
    for (std::size_t t = 0; t + 1 < series.size(); ++t) d.diffs.push_back(series[t + 1] - series[t]);
    return d;
}

std::vector<double> reconstruct(const std::vector<double>& diffs, double anchor) {
    std::vector<double> out;
    out.reserve(diffs.size() + 1);
    out.push_back(anchor);
    for (double d : diffs) out.push_back(out.back() + d);
    return out;
}

DifferencedDaily differenced_daily_bundle(const DailyFeatures& daily, bool difference_all) {
    const std::size_t days = daily.mean.size();
    if (days < 3) throw ConfigError("differenced daily pipeline needs at least three days");
    const auto mean_diff = difference(daily.mean);
    const auto std_diff = difference(daily.stddev);

    DifferencedDaily out;
    for (std::size_t i = 0; i + 2 < days; ++i) {
        Vector x(2);
        x << mean_diff.diffs[i], difference_all ? std_diff.diffs[i] : daily.stddev[i + 1];
        out.bundle.inputs.push_back(x);
        out.bundle.targets.push_back(Vector::Constant(1, mean_diff.diffs[i + 1]));
        out.level_base.push_back(daily.mean[i + 1]);
        out.level_target.push_back(daily.mean[i + 2]);
    }
    return out;
}

Split split_60_20_20(std::size_t length) {
    if (length < 5) throw ConfigError("a 60/20/20 split needs at least 5 rows");
    return {length * 6 / 10, length * 8 / 10};
}

SeriesBundle split_60_20_20(SeriesBundle bundle) {
    bundle.split = split_60_20_20(bundle.size());
    return bundle;
}

Calibration fit_calibration(const std::vector<double>& predictions, const std::vector<double>& targets) {
    if (predictions.size() != targets.size() || predictions.empty())
        throw ConfigError("calibration needs equally sized, non-empty prediction and target lists");
    const double n = static_cast<double>(predictions.size());
    double mp = 0.0, mt = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        mp += predictions[i];
        mt += targets[i];
    }
    mp /= n;
    mt /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        sxx += (predictions[i] - mp) * (predictions[i] - mp);
        sxy += (predictions[i] - mp) * (targets[i] - mt);
    }
    Calibration cal;
    const double spread = std::max(std::abs(mp), 1.0);
    if (predictions.size() < 2 || sxx <= 1e-24 * spread * spread * n) {
        cal.slope = 0.0;
        cal.intercept = mt;
        cal.intercept_only = true;
        return cal;
    }
    cal.slope = sxy / sxx;
    cal.intercept = mt - cal.slope * mp;
    return cal;
}

std::vector<double> apply_calibration(const Calibration& cal, const std::vector<double>& predictions) {
    std::vector<double> out;
    out.reserve(predictions.size());
    for (double p : predictions) out.push_back(cal.slope * p + cal.intercept);
    return out;
}

Scaler Scaler::fit(const SeriesBundle& bundle, std::size_t fit_end) {
    bundle.validate();
    if (fit_end == 0 || fit_end > bundle.size()) throw ConfigError("scaler fit range is empty or out of bounds");
    auto stats = [fit_end](const std::vector<Vector>& rows, Vector& mean, Vector& scale) {
        const auto dim = rows.front().size();
        mean = Vector::Zero(dim);
        for (std::size_t t = 0; t < fit_end; ++t) mean += rows[t];
        mean /= static_cast<double>(fit_end);
        Vector var = Vector::Zero(dim);
        for (std::size_t t = 0; t < fit_end; ++t) var += (rows[t] - mean).cwiseAbs2();
        var /= static_cast<double>(fit_end);
        scale = var.cwiseSqrt();
        for (Eigen::Index i = 0; i < dim; ++i)
            if (!(scale[i] > 0.0)) scale[i] = 1.0;
    };
    Scaler s;
    stats(bundle.inputs, s.input_mean, s.input_scale);
    stats(bundle.targets, s.target_mean, s.target_scale);
    return s;
}

Scaler Scaler::identity(int feature_dim, int output_dim) {
    return {Vector::Zero(feature_dim), Vector::Ones(feature_dim), Vector::Zero(output_dim), Vector::Ones(output_dim)};
}

Vector Scaler::transform_input(const Vector& x) const {
    require_size(x, input_mean.size(), "scaler input");
    return (x - input_mean).cwiseQuotient(input_scale);
}

Vector Scaler::inverse_target(const Vector& y) const {
    require_size(y, target_mean.size(), "scaler target");
    return y.cwiseProduct(target_scale) + target_mean;
}

SeriesBundle Scaler::transform(const SeriesBundle& bundle) const {
    SeriesBundle out = bundle;
    for (auto& x : out.inputs) x = transform_input(x);
    for (auto& y : out.targets) {
        require_size(y, target_mean.size(), "scaler target");
        y = (y - target_mean).cwiseQuotient(target_scale);
    }
    return out;
}

ErrorMetrics compute_metrics(const std::vector<Vector>& predictions, const std::vector<Vector>& targets) {
    if (predictions.size() != targets.size() || predictions.empty())
        throw ConfigError("metrics need equally sized, non-empty prediction and target lists");
    double sq = 0.0, abs_sum = 0.0;
    std::size_t coords = 0;
    for (std::size_t t = 0; t < predictions.size(); ++t) {
        const Vector e = targets[t] - predictions[t];
        sq += e.squaredNorm();
        abs_sum += e.cwiseAbs().sum();
        coords += static_cast<std::size_t>(e.size());
    }
    const double n = static_cast<double>(predictions.size());
    return {std::sqrt(sq / n), abs_sum / static_cast<double>(coords)};
}

ErrorMetrics compute_metrics(const std::vector<double>& predictions, const std::vector<double>& targets) {
    std::vector<Vector> p, t;
    for (double v : predictions) p.push_back(Vector::Constant(1, v));
    for (double v : targets) t.push_back(Vector::Constant(1, v));
    return compute_metrics(p, t);
}

}  // namespace mrnn
