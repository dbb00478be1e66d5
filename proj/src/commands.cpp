#include "mrnn/commands.hpp"

#include "mrnn/checkpoint.hpp"
#include "mrnn/csv.hpp"
#include "mrnn/errors.hpp"
#include "mrnn/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace mrnn {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
}

std::string path_in(const RunConfig& config, const std::string& name) { return (fs::path(config.out) / name).string(); }

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << text;
    if (!out) throw IoError("write failed for '" + path + "'");
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

// The echo as a JSON object of strings, in key order of the text form.
json config_json(const RunConfig& config) {
    json j = json::object();
    std::istringstream in(config.to_text());
    std::string line;
    while (std::getline(in, line)) {
        const auto [k, v] = split_assignment(line);
        j[k] = v;
    }
    return j;
}

void write_echo(const RunConfig& config) { write_text(path_in(config, "run_config.txt"), config.to_text()); }

json matrix_rows_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

json metrics_json(const ErrorMetrics& m) { return {{"rmse", m.rmse}, {"mae", m.mae}}; }

std::vector<std::string> numbered(const std::string& stem, int count) {
    if (count == 1) return {stem};
    std::vector<std::string> names;
    for (int i = 1; i <= count; ++i) names.push_back(stem + "_" + std::to_string(i));
    return names;
}

std::vector<Vector> slice(const std::vector<Vector>& v, std::size_t begin, std::size_t end) {
    return {v.begin() + static_cast<std::ptrdiff_t>(begin), v.begin() + static_cast<std::ptrdiff_t>(end)};
}

std::pair<std::size_t, std::size_t> segment_range(const std::string& segment, const SeriesBundle& s) {
    const Split split = *s.split;
    if (segment == "test") return {split.val_end, s.size()};
    if (segment == "val") return {split.train_end, split.val_end};
    return {0, s.size()};
}

// Column names in a series CSV that carry a given prefix: "x" alone or
// "x_1", "x_2", ... in order.
std::vector<std::size_t> prefixed_columns(const CsvTable& table, const std::string& stem) {
    for (std::size_t i = 0; i < table.header.size(); ++i)
        if (table.header[i] == stem) return {i};
    std::vector<std::size_t> cols;
    for (int k = 1;; ++k) {
        const auto it = std::find(table.header.begin(), table.header.end(), stem + "_" + std::to_string(k));
        if (it == table.header.end()) break;
        cols.push_back(static_cast<std::size_t>(it - table.header.begin()));
    }
    return cols;
}

bool looks_like_series(const CsvTable& table) {
    return !prefixed_columns(table, "x").empty() && !prefixed_columns(table, "y").empty();
}

SeriesBundle series_from_table(const CsvTable& table) {
    const auto xs = prefixed_columns(table, "x");
    const auto ys = prefixed_columns(table, "y");
    const auto regime_it = std::find(table.header.begin(), table.header.end(), "regime");
    const bool has_regime = regime_it != table.header.end();
    const std::size_t regime_col = static_cast<std::size_t>(regime_it - table.header.begin());

    SeriesBundle s;
    if (has_regime) s.regime_labels.emplace();
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        auto field = [&](std::size_t col) {
            try {
                return parse_double(row[col]);
            } catch (const ConfigError& e) {
                throw IoError(table.path + ": data row " + std::to_string(r + 1) + ", column '" + table.header[col] +
                              "': " + e.what());
            }
        };
        Vector x(static_cast<Eigen::Index>(xs.size())), y(static_cast<Eigen::Index>(ys.size()));
        for (std::size_t i = 0; i < xs.size(); ++i) x[static_cast<Eigen::Index>(i)] = field(xs[i]);
        for (std::size_t i = 0; i < ys.size(); ++i) y[static_cast<Eigen::Index>(i)] = field(ys[i]);
        s.inputs.push_back(std::move(x));
        s.targets.push_back(std::move(y));
        if (has_regime) {
            const double label = field(regime_col);
            if (label != std::floor(label) || label < 1)
                throw IoError(table.path + ": data row " + std::to_string(r + 1) + ": regime must be a positive integer");
            s.regime_labels->push_back(static_cast<int>(label));
        }
    }
    if (s.size() == 0) throw IoError(table.path + ": no data rows");
    return s;
}

std::string model_label(int num_regimes) { return num_regimes == 1 ? "vanilla-rnn-equivalent" : "markovian-rnn"; }

}  // namespace

SeriesBundle read_series_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    if (!looks_like_series(table)) throw IoError(path + ": expected x and y columns");
    return series_from_table(table);
}

void write_series_csv(const SeriesBundle& series, const std::string& path) {
    std::vector<std::string> header{"t"};
    for (auto& n : numbered("x", series.feature_dim())) header.push_back(n);
    for (auto& n : numbered("y", series.output_dim())) header.push_back(n);
    if (series.regime_labels) header.push_back("regime");
    CsvWriter w(path, header);
    for (std::size_t t = 0; t < series.size(); ++t) {
        std::vector<std::string> row{std::to_string(t)};
        for (Eigen::Index i = 0; i < series.inputs[t].size(); ++i) row.push_back(format_double(series.inputs[t][i]));
        for (Eigen::Index i = 0; i < series.targets[t].size(); ++i) row.push_back(format_double(series.targets[t][i]));
        if (series.regime_labels) row.push_back(std::to_string((*series.regime_labels)[t]));
        w.row(row);
    }
    w.close();
}

RunData load_run_data(const RunConfig& config) {
    RunData out;
    if (config.data.empty()) {
        const SyntheticSpec spec = config.effective_synthetic();
        out.series = split_60_20_20(generate(spec));
        out.source = "synthetic:" + to_string(spec.kind);
        return out;
    }
    if (!fs::exists(config.data)) throw IoError("input file '" + config.data + "' does not exist");
    const CsvTable table = read_csv(config.data);
    out.source = config.data;
    if (looks_like_series(table)) {
        out.series = split_60_20_20(series_from_table(table));
        return out;
    }
    const RawSeries raw = load_csv(config.data, config.schema);
    DifferencedDaily diffed = differenced_daily_bundle(daily_aggregate(raw), config.difference_all);
    out.series = split_60_20_20(diffed.bundle);
    out.levels = std::move(diffed);
    return out;
}

void cmd_simulate(const RunConfig& config) {
    config.validate();
    const SyntheticSpec spec = config.effective_synthetic();
    const SeriesBundle series = generate(spec);
    ensure_dir(config.out);
    write_series_csv(series, path_in(config, "series.csv"));

    json j;
    j["kind"] = to_string(spec.kind);
    j["length"] = spec.length;
    j["noise_std"] = spec.noise_std;
    j["seed"] = spec.seed;
    switch (spec.kind) {
        case SyntheticKind::ar_deterministic:
            j["segment_length"] = spec.segment_length;
            break;
        case SyntheticKind::ar_markov:
            j["ar_coeffs"] = spec.ar_coeffs;
            break;
        case SyntheticKind::sine_markov:
            j["periods"] = spec.periods;
            j["magnitude"] = spec.magnitude;
            break;
    }
    if (spec.kind != SyntheticKind::ar_deterministic) {
        const Matrix psi = spec.transition.size() > 0 ? spec.transition : SyntheticSpec::defaults(spec.kind).transition;
        j["transition"] = matrix_rows_json(psi);
        j["initial_regime"] = spec.initial_regime ? json(*spec.initial_regime) : json(nullptr);
    }
    j["config"] = config_json(config);
    write_json(path_in(config, "spec.json"), j);
    write_echo(config);
    std::cout << "wrote " << series.size() << " rows to " << path_in(config, "series.csv") << "\n";
}

void cmd_train(const RunConfig& config) {
    config.validate();
    const RunData data = load_run_data(config);
    const SeriesBundle& series = data.series;
    const auto [train_end, val_end] = *series.split;
    if (val_end <= train_end) throw ConfigError("validation segment is empty");
    ensure_dir(config.out);

    const Hyperparams hp = config.effective_hp();
    const Scaler scaler = config.options.standardize ? Scaler::fit(series, train_end)
                                                     : Scaler::identity(series.feature_dim(), series.output_dim());
    const SeriesBundle scaled = scaler.transform(series);
    std::cout << "training " << model_label(hp.num_regimes) << " on " << data.source << " (" << train_end
              << " train / " << (val_end - train_end) << " validation steps)\n";
    const TrainResult trained = train(scaled, hp, config.switching);

    const Checkpoint ckpt{trained.params, hp, config.switching, scaler};
    const std::string ckpt_path = config.checkpoint_path();
    if (const auto parent = fs::path(ckpt_path).parent_path(); !parent.empty()) ensure_dir(parent.string());
    save_checkpoint(ckpt, ckpt_path);

    CsvWriter epochs(path_in(config, "epochs.csv"), {"epoch", "train_loss", "val_loss"});
    for (const auto& e : trained.report.epochs)
        epochs.row({std::to_string(e.epoch), format_double(e.train_loss), format_double(e.val_loss)});
    epochs.close();

    const EvalResult val = evaluate(scaled, trained.params, config.switching, train_end, val_end);
    std::vector<Vector> val_pred;
    for (const auto& p : val.predictions) val_pred.push_back(scaler.inverse_target(p));
    const ErrorMetrics val_metrics = compute_metrics(val_pred, slice(series.targets, train_end, val_end));

    json j;
    j["model"] = model_label(hp.num_regimes);
    j["num_regimes"] = hp.num_regimes;
    j["best_epoch"] = trained.report.best_epoch;
    j["best_val_loss"] = trained.report.best_val_loss;
    j["epochs_run"] = trained.report.epochs.size();
    j["stopped_early"] = trained.report.stopped_early;
    j["validation"] = metrics_json(val_metrics);
    j["transition"] = matrix_rows_json(trained.params.transition);
    j["checkpoint"] = ckpt_path;
    j["source"] = data.source;
    j["config"] = config_json(config);
    write_json(path_in(config, "summary.json"), j);
    write_echo(config);
    std::cout << "best epoch " << trained.report.best_epoch << ", validation RMSE " << format_double(val_metrics.rmse)
              << ", MAE " << format_double(val_metrics.mae) << "\n";
}

void cmd_eval(const RunConfig& config) {
    config.validate();
    const Checkpoint ckpt = load_checkpoint(config.checkpoint_path());
    const RunData data = load_run_data(config);
    const SeriesBundle& series = data.series;
    if (ckpt.input_features() != series.feature_dim())
        throw StateError("checkpoint expects " + std::to_string(ckpt.input_features()) + " input feature(s) but " +
                         data.source + " has " + std::to_string(series.feature_dim()));
    if (ckpt.params.output_dim() != series.output_dim())
        throw StateError("checkpoint predicts " + std::to_string(ckpt.params.output_dim()) + " output(s) but " +
                         data.source + " has " + std::to_string(series.output_dim()));
    ensure_dir(config.out);

    const auto [begin, end] = segment_range(config.segment, series);
    if (begin >= end) throw ConfigError("segment '" + config.segment + "' is empty");
    const SeriesBundle scaled = ckpt.scaler.transform(series);
    const EvalResult rolled = evaluate(scaled, ckpt.params, ckpt.config, 0, series.size());
    std::vector<Vector> predictions;
    for (const auto& p : rolled.predictions) predictions.push_back(ckpt.scaler.inverse_target(p));

    const int K = ckpt.params.num_regimes();
    const int ny = series.output_dim();
    std::vector<std::string> header{"t"};
    for (auto& n : numbered("y_true", ny)) header.push_back(n);
    for (auto& n : numbered("y_pred", ny)) header.push_back(n);
    for (int k = 1; k <= K; ++k) header.push_back("alpha_" + std::to_string(k));
    CsvWriter w(path_in(config, "predictions.csv"), header);
    for (std::size_t t = begin; t < end; ++t) {
        std::vector<std::string> row{std::to_string(t)};
        for (int i = 0; i < ny; ++i) row.push_back(format_double(series.targets[t][i]));
        for (int i = 0; i < ny; ++i) row.push_back(format_double(predictions[t][i]));
        for (int k = 0; k < K; ++k) row.push_back(format_double(rolled.beliefs[t][k]));
        w.row(row);
    }
    w.close();

    json j;
    j["segment"] = config.segment;
    j["begin"] = begin;
    j["end"] = end;
    j["steps"] = end - begin;
    const ErrorMetrics m = compute_metrics(slice(predictions, begin, end), slice(series.targets, begin, end));
    j["rmse"] = m.rmse;
    j["mae"] = m.mae;
    j["model"] = model_label(K);

    if (series.regime_labels) {
        const auto& labels = *series.regime_labels;
        // Model regimes carry no names; they are matched to labels on the
        // validation segment when scoring test, else on the scored range.
        auto [align_begin, align_end] =
            config.segment == "test" ? segment_range("val", series) : std::pair{begin, end};
        const int num_labels = *std::max_element(labels.begin(), labels.end());
        const RegimeMap map = align_regimes(slice(rolled.beliefs, align_begin, align_end),
                                            std::span<const int>(labels.data() + align_begin, align_end - align_begin),
                                            num_labels);
        const std::vector<Vector> scored = slice(rolled.beliefs, begin, end);
        const std::span<const int> scored_labels(labels.data() + begin, end - begin);
        j["regime_map"] = map;
        j["regime_accuracy"] = regime_accuracy(scored, scored_labels, map, 0);
        j["regime_accuracy_excluding_switches"] =
            regime_accuracy(scored, scored_labels, map, config.options.exclude_after_switch);
        j["exclude_after_switch"] = config.options.exclude_after_switch;
        const auto lag = crossover_lag(scored, scored_labels, map);
        j["crossover_lag"] = lag ? json(*lag) : json(nullptr);
    }

    if (data.levels) {
        // Differenced predictions mapped back to price levels; the linear
        // calibration is fitted on validation and applied to the scored range.
        const auto& lv = *data.levels;
        const Split split = *series.split;
        std::vector<double> level_pred(series.size()), level_true(lv.level_target);
        for (std::size_t t = 0; t < series.size(); ++t) level_pred[t] = lv.level_base[t] + predictions[t][0];
        auto sub = [](const std::vector<double>& v, std::size_t b, std::size_t e) {
            return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(b), v.begin() + static_cast<std::ptrdiff_t>(e));
        };
        const Calibration cal =
            fit_calibration(sub(level_pred, split.train_end, split.val_end), sub(level_true, split.train_end, split.val_end));
        const std::vector<double> calibrated = apply_calibration(cal, sub(level_pred, begin, end));
        const ErrorMetrics raw_levels = compute_metrics(sub(level_pred, begin, end), sub(level_true, begin, end));
        const ErrorMetrics cal_levels = compute_metrics(calibrated, sub(level_true, begin, end));
        j["levels"] = {{"uncalibrated", metrics_json(raw_levels)},
                       {"calibrated", metrics_json(cal_levels)},
                       {"calibration", {{"slope", cal.slope}, {"intercept", cal.intercept}, {"intercept_only", cal.intercept_only}}}};
        CsvWriter lw(path_in(config, "levels.csv"), {"t", "level_true", "level_pred", "level_pred_calibrated"});
        for (std::size_t t = begin; t < end; ++t)
            lw.row({std::to_string(t), format_double(level_true[t]), format_double(level_pred[t]),
                    format_double(calibrated[t - begin])});
        lw.close();
    }
    j["checkpoint"] = config.checkpoint_path();
    j["source"] = data.source;
    j["config"] = config_json(config);
    write_json(path_in(config, "metrics.json"), j);
    write_echo(config);
    std::cout << config.segment << " RMSE " << format_double(m.rmse) << ", MAE " << format_double(m.mae) << "\n";
}

void cmd_sweep(const RunConfig& config) {
    if (config.sweep_axes.empty()) throw ConfigError("sweep needs at least one 'sweep.<key> = v1, v2, ...' axis");
    config.validate();

    // Cartesian grid with the last axis varying fastest.
    std::vector<std::vector<std::string>> points{{}};
    for (const auto& [axis, values] : config.sweep_axes) {
        std::vector<std::vector<std::string>> next;
        for (const auto& p : points)
            for (const auto& v : values) {
                auto q = p;
                q.push_back(v);
                next.push_back(std::move(q));
            }
        points = std::move(next);
    }

    struct Row {
        std::optional<ExperimentResult> result;
        std::string error;
    };
    std::vector<Row> rows(points.size());
    const auto run_point = [&](std::size_t i) {
        try {
            RunConfig point = config;
            point.sweep_axes.clear();
            for (std::size_t a = 0; a < config.sweep_axes.size(); ++a) point.set(config.sweep_axes[a].first, points[i][a]);
            const RunData data = load_run_data(point);
            rows[i].result = run_experiment(data.series, point.effective_hp(), point.switching, point.options);
        } catch (const std::exception& e) {
            rows[i].error = e.what();
        }
    };
    const auto n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(dynamic, 1) if (config.parallel)
    for (std::ptrdiff_t i = 0; i < n; ++i) run_point(static_cast<std::size_t>(i));

    ensure_dir(config.out);
    std::vector<std::string> header;
    for (const auto& [axis, _] : config.sweep_axes) header.push_back(axis);
    for (const char* c : {"val_mse", "val_rmse", "val_mae", "test_rmse", "test_mae", "best_epoch", "epochs_run",
                          "regime_accuracy", "crossover_lag", "error"})
        header.push_back(c);
    CsvWriter w(path_in(config, "sweep.csv"), header);
    std::optional<std::size_t> best;
    const auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::vector<std::string> row = points[i];
        if (const auto& r = rows[i].result) {
            const double val_mse = r->val_metrics.rmse * r->val_metrics.rmse;
            for (const auto& s : {format_double(val_mse), format_double(r->val_metrics.rmse), format_double(r->val_metrics.mae),
                                  format_double(r->test_metrics.rmse), format_double(r->test_metrics.mae),
                                  std::to_string(r->report.best_epoch), std::to_string(r->report.epochs.size()),
                                  opt(r->regime_accuracy), opt(r->crossover_lag), std::string()})
                row.push_back(s);
            if (!best || val_mse < rows[*best].result->val_metrics.rmse * rows[*best].result->val_metrics.rmse) best = i;
        } else {
            for (int c = 0; c < 9; ++c) row.emplace_back();
            row.push_back(rows[i].error);
        }
        w.row(row);
    }
    w.close();
    write_echo(config);
    if (!best) throw NumericError("every sweep configuration failed; see " + path_in(config, "sweep.csv"));

    const ExperimentResult& r = *rows[*best].result;
    json j;
    json params = json::object();
    for (std::size_t a = 0; a < config.sweep_axes.size(); ++a) params[config.sweep_axes[a].first] = points[*best][a];
    j["row"] = *best;
    j["params"] = params;
    j["val_mse"] = r.val_metrics.rmse * r.val_metrics.rmse;
    j["validation"] = metrics_json(r.val_metrics);
    j["test"] = metrics_json(r.test_metrics);
    j["regime_accuracy"] = r.regime_accuracy ? json(*r.regime_accuracy) : json(nullptr);
    j["crossover_lag"] = r.crossover_lag ? json(*r.crossover_lag) : json(nullptr);
    j["grid_size"] = points.size();
    j["config"] = config_json(config);
    write_json(path_in(config, "sweep_best.json"), j);
    std::cout << "swept " << points.size() << " configurations; best row " << *best << " (validation MSE "
              << format_double(r.val_metrics.rmse * r.val_metrics.rmse) << ")\n";
}

}  // namespace mrnn
