#include "mrnn/experiment.hpp"

#include "mrnn/errors.hpp"

#include <algorithm>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mrnn {

int argmax(const Vector& v) {
    Eigen::Index idx = 0;
    v.maxCoeff(&idx);
    return static_cast<int>(idx);
}

RegimeMap align_regimes(const std::vector<Vector>& beliefs, std::span<const int> labels, int num_labels) {
    if (beliefs.empty() || beliefs.size() != labels.size())
        throw ConfigError("regime alignment needs equally sized, non-empty belief and label lists");
    const int k_count = static_cast<int>(beliefs.front().size());
    // counts(k, l): steps where regime k is the argmax and the label is l + 1.
    Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(k_count, num_labels);
    for (std::size_t t = 0; t < beliefs.size(); ++t) {
        if (labels[t] < 1 || labels[t] > num_labels) throw ConfigError("regime label out of range");
        ++counts(argmax(beliefs[t]), labels[t] - 1);
    }

    RegimeMap best(k_count);
    if (k_count == num_labels && k_count <= 8) {
        std::vector<int> perm(k_count);
        std::iota(perm.begin(), perm.end(), 0);
        int best_score = -1;
        do {
            int score = 0;
            for (int k = 0; k < k_count; ++k) score += counts(k, perm[k]);
            if (score > best_score) {
                best_score = score;
                for (int k = 0; k < k_count; ++k) best[k] = perm[k] + 1;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        return best;
    }
    for (int k = 0; k < k_count; ++k) {
        Eigen::Index l = 0;
        counts.row(k).maxCoeff(&l);
        best[k] = static_cast<int>(l) + 1;
    }
    return best;
}

double regime_accuracy(const std::vector<Vector>& beliefs, std::span<const int> labels, const RegimeMap& mapping,
                       std::size_t exclude_after_switch) {
    if (beliefs.size() != labels.size()) throw ConfigError("beliefs and labels differ in length");
    std::size_t hits = 0, scored = 0, since_switch = exclude_after_switch;
    for (std::size_t t = 0; t < labels.size(); ++t) {
        if (t > 0 && labels[t] != labels[t - 1]) since_switch = 0;
        if (since_switch < exclude_after_switch) {
            ++since_switch;
            continue;
        }
        ++scored;
        if (mapping.at(static_cast<std::size_t>(argmax(beliefs[t]))) == labels[t]) ++hits;
    }
    if (scored == 0) throw ConfigError("no steps left to score after excluding switch windows");
    return static_cast<double>(hits) / static_cast<double>(scored);
}

std::optional<double> crossover_lag(const std::vector<Vector>& beliefs, std::span<const int> labels,
                                    const RegimeMap& mapping) {
    if (beliefs.size() != labels.size()) throw ConfigError("beliefs and labels differ in length");
    std::vector<std::size_t> switches;
    for (std::size_t t = 1; t < labels.size(); ++t)
        if (labels[t] != labels[t - 1]) switches.push_back(t);
    if (switches.empty()) return std::nullopt;

    double total = 0.0;
    for (std::size_t i = 0; i < switches.size(); ++i) {
        const std::size_t start = switches[i];
        const std::size_t stop = i + 1 < switches.size() ? switches[i + 1] : labels.size();
        std::size_t t = start;
        while (t < stop && mapping.at(static_cast<std::size_t>(argmax(beliefs[t]))) != labels[start]) ++t;
        total += static_cast<double>(t - start);
    }
    return total / static_cast<double>(switches.size());
}

ExperimentResult run_experiment(const SeriesBundle& series, const Hyperparams& hp, const SwitchConfig& config,
                                const ExperimentOptions& options) {
    series.validate();
    if (!series.split) throw ConfigError("experiment needs split boundaries");
    const auto [train_end, val_end] = *series.split;
    const std::size_t end = series.size();
    if (val_end >= end) throw ConfigError("test segment is empty");

    ExperimentResult out;
    out.scaler = options.standardize ? Scaler::fit(series, train_end)
                                     : Scaler::identity(series.feature_dim(), series.output_dim());
    const SeriesBundle scaled = out.scaler.transform(series);

    TrainResult trained = train(scaled, hp, config);
    out.params = std::move(trained.params);
    out.report = std::move(trained.report);

    auto to_original = [&](const std::vector<Vector>& predictions) {
        std::vector<Vector> restored;
        restored.reserve(predictions.size());
        for (const auto& p : predictions) restored.push_back(out.scaler.inverse_target(p));
        return restored;
    };
    auto slice = [&](std::size_t b, std::size_t e) {
        return std::vector<Vector>(series.targets.begin() + static_cast<std::ptrdiff_t>(b),
                                   series.targets.begin() + static_cast<std::ptrdiff_t>(e));
    };

    // One rollout covers validation and test so the test segment keeps the
    // filter state built up over validation.
    const EvalResult rolled = evaluate(scaled, out.params, config, train_end, end);
    const std::size_t n_val = val_end - train_end;
    std::vector<Vector> val_pred(rolled.predictions.begin(), rolled.predictions.begin() + static_cast<std::ptrdiff_t>(n_val));
    out.test_predictions.assign(rolled.predictions.begin() + static_cast<std::ptrdiff_t>(n_val), rolled.predictions.end());
    out.test_beliefs.assign(rolled.beliefs.begin() + static_cast<std::ptrdiff_t>(n_val), rolled.beliefs.end());
    out.val_metrics = compute_metrics(to_original(val_pred), slice(train_end, val_end));
    out.test_predictions = to_original(out.test_predictions);
    out.test_metrics = compute_metrics(out.test_predictions, slice(val_end, end));

    if (series.regime_labels) {
        const auto& labels = *series.regime_labels;
        const int num_labels = *std::max_element(labels.begin(), labels.end());
        const std::vector<Vector> val_beliefs(rolled.beliefs.begin(), rolled.beliefs.begin() + static_cast<std::ptrdiff_t>(n_val));
        const std::span<const int> val_labels(labels.data() + train_end, n_val);
        const std::span<const int> test_labels(labels.data() + val_end, end - val_end);
        out.regime_map = align_regimes(val_beliefs, val_labels, std::max(num_labels, 1));
        out.regime_accuracy = regime_accuracy(out.test_beliefs, test_labels, *out.regime_map, options.exclude_after_switch);
        out.crossover_lag = crossover_lag(out.test_beliefs, test_labels, *out.regime_map);
    }
    return out;
}

ExperimentResult run_job(const ExperimentJob& job) {
    return run_experiment(split_60_20_20(generate(job.data)), job.hp, job.config, job.options);
}

std::vector<JobOutcome> run_jobs_serial(std::span<const ExperimentJob> jobs) {
    std::vector<JobOutcome> out(jobs.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        try {
            out[i].result = run_job(jobs[i]);
        } catch (...) {
            out[i].error = std::current_exception();
        }
    }
    return out;
}

std::vector<JobOutcome> run_jobs_parallel(std::span<const ExperimentJob> jobs) {
    std::vector<JobOutcome> out(jobs.size());
    const auto n = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            out[static_cast<std::size_t>(i)].result = run_job(jobs[static_cast<std::size_t>(i)]);
        } catch (...) {
            out[static_cast<std::size_t>(i)].error = std::current_exception();
        }
    }
    return out;
}

}  // namespace mrnn
