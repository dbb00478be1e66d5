#pragma once

// End-to-end runs on labeled or unlabeled series: standardize on the
// training prefix, train, score validation and test in original units and,
// when ground-truth regimes exist, measure regime recovery.

#include "mrnn/datagen.hpp"
#include "mrnn/evalio.hpp"
#include "mrnn/hmm_switch.hpp"
#include "mrnn/training.hpp"

#include <exception>
#include <optional>
#include <span>
#include <vector>

namespace mrnn {

// Model regime k is reported as true label mapping[k] (1-based).
using RegimeMap = std::vector<int>;

int argmax(const Vector& v);

// Best one-to-one assignment when K equals the number of labels, majority
// vote per model regime otherwise. Scored over beliefs[i] vs labels[i].
RegimeMap align_regimes(const std::vector<Vector>& beliefs, std::span<const int> labels, int num_labels);

// Fraction of steps whose mapped argmax belief equals the label, skipping
// `exclude_after_switch` steps starting at every label change.
double regime_accuracy(const std::vector<Vector>& beliefs, std::span<const int> labels, const RegimeMap& mapping,
                       std::size_t exclude_after_switch = 0);

// Mean number of steps from a label change until the mapped argmax belief
// first agrees with the new label. A switch that is never picked up before
// the next one counts its whole span. Returns nullopt without switches.
std::optional<double> crossover_lag(const std::vector<Vector>& beliefs, std::span<const int> labels,
                                    const RegimeMap& mapping);

struct ExperimentOptions {
    bool standardize = true;
    std::size_t exclude_after_switch = 25;
};

struct ExperimentResult {
    TrainReport report;
    ModelParams params;
    Scaler scaler;
    ErrorMetrics val_metrics;   // original units
    ErrorMetrics test_metrics;  // original units
    std::vector<Vector> test_predictions;  // original units
    std::vector<Vector> test_beliefs;
    std::optional<RegimeMap> regime_map;
    std::optional<double> regime_accuracy;  // test segment
    std::optional<double> crossover_lag;    // test segment
};

// `series` must carry split boundaries with a non-empty test segment.
ExperimentResult run_experiment(const SeriesBundle& series, const Hyperparams& hp, const SwitchConfig& config,
                                const ExperimentOptions& options = {});

struct ExperimentJob {
    SyntheticSpec data;
    Hyperparams hp;
    SwitchConfig config;
    ExperimentOptions options;
};

struct JobOutcome {
    std::optional<ExperimentResult> result;
    std::exception_ptr error;
};

ExperimentResult run_job(const ExperimentJob& job);

// Reference path: jobs in order on the calling thread.
std::vector<JobOutcome> run_jobs_serial(std::span<const ExperimentJob> jobs);

// OpenMP path: jobs are independent and share no state, so the outcomes
// are identical to the serial path.
std::vector<JobOutcome> run_jobs_parallel(std::span<const ExperimentJob> jobs);

}  // namespace mrnn
