#pragma once

// Multi-regime recurrent cell. Each regime k owns its own input and
// recurrent weights; the regime hidden states are blended with the
// previous-step belief and mapped to the output through one shared
// linear layer.

#include "mrnn/linalg.hpp"

#include <optional>
#include <vector>

namespace mrnn {

struct ModelParams {
    std::vector<Matrix> regime_input_weights;      // K x (n_h x n_x)
    std::vector<Matrix> regime_recurrent_weights;  // K x (n_h x n_h)
    Matrix output_weights;                         // n_y x n_h
    Matrix transition;                             // K x K, row-stochastic

    int num_regimes() const { return static_cast<int>(regime_recurrent_weights.size()); }
    int hidden_dim() const { return static_cast<int>(output_weights.cols()); }
    int input_dim() const {
        return regime_input_weights.empty() ? 0 : static_cast<int>(regime_input_weights.front().cols());
    }
    int output_dim() const { return static_cast<int>(output_weights.rows()); }

    // Zero weights with a K x K identity transition.
    static ModelParams zeros(int num_regimes, int hidden_dim, int input_dim, int output_dim);

    // Shape, stochasticity and finiteness checks. Throws ConfigError,
    // StateError or NumericError.
    void validate() const;
};

// Recurrent state carried between steps. The tanh cell only uses `hidden`;
// gated cells would carry their memory in `cell`.
struct CellState {
    Vector hidden;
    Vector cell;

    static CellState zeros(int hidden_dim) { return {Vector::Zero(hidden_dim), Vector()}; }
};

// Where the belief used at a step came from: the previous belief and the
// likelihood vector of the filter update that produced it. Absent for the
// first step after a state reset, where the belief is a constant prior.
struct BeliefOrigin {
    Vector prior_belief;
    Vector likelihoods;
};

struct StepTrace {
    Vector input;
    Vector prev_hidden;
    Vector belief_used;
    std::optional<BeliefOrigin> belief_origin;

    std::vector<Vector> regime_preactivations;
    std::vector<Vector> regime_hidden;
    std::vector<Vector> regime_predictions;
    Vector combined_hidden;
    Vector combined_prediction;
};

struct RegimeOutput {
    Vector preactivation;
    Vector hidden;
};

RegimeOutput regime_forward(const Vector& prev_hidden, const Vector& input, const ModelParams& params, int regime);

// Belief-weighted average of the regime hidden states.
Vector combine_hidden(const std::vector<Vector>& regime_hidden, const Vector& belief);

Vector output_map(const Vector& hidden, const ModelParams& params);

StepTrace cell_step(const CellState& prev, const Vector& belief, const Vector& input, const ModelParams& params);

// Tolerance used when checking that a belief vector is normalized.
inline constexpr double kBeliefTolerance = 1e-9;

void check_belief(const Vector& belief, int num_regimes);

}  // namespace mrnn
