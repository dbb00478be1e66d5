#pragma once

// Sequential training of the multi-regime RNN: one gradient step per time
// step over a truncated window, transition renormalization, filter update,
// and validation-driven early stopping.

#include "mrnn/evalio.hpp"
#include "mrnn/hmm_switch.hpp"
#include "mrnn/rnn_core.hpp"
#include "mrnn/series.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace mrnn {

// How the transition matrix is brought back onto the simplex after a
// gradient step.
//   softmax: psi <- row_softmax(psi - eta * g), applied to the probabilities
//            themselves; repeated application flattens rows toward uniform.
//   logit:   psi is the row softmax of latent logits (log psi up to a row
//            shift); the gradient is chained through the softmax and the
//            logits take the step.
//   fixed:   psi keeps its initial value.
enum class TransitionUpdate { softmax, logit, fixed };

std::string to_string(TransitionUpdate mode);
TransitionUpdate transition_update_from_string(const std::string& name);

struct Hyperparams {
    int num_regimes = 2;
    int hidden_dim = 16;
    int truncation = 4;
    double learning_rate = 3e-4;
    double dirichlet_rho0 = 0.5;
    int max_epochs = 200;
    int early_stop_tolerance = 20;
    double clip_norm = 5.0;  // <= 0 disables clipping
    TransitionUpdate transition_update = TransitionUpdate::softmax;
    std::uint64_t seed = 1;

    void validate() const;
};

struct GradientSet {
    std::vector<Matrix> d_regime_input_weights;
    std::vector<Matrix> d_regime_recurrent_weights;
    Matrix d_output_weights;
    Matrix d_transition;

    static GradientSet zeros_like(const ModelParams& params);
    double squared_norm() const;
    void scale(double factor);
};

// Xavier-uniform weights; transition rows drawn from a Dirichlet with
// rho0 on the diagonal and (1 - rho0) / (K - 1) elsewhere.
ModelParams init_params(const Hyperparams& hp, int input_dim, int output_dim);

// Gradient of e^T e at the last trace of `window` with respect to every
// parameter. The window's first trace takes its previous hidden state as a
// constant. Beliefs enter through the transition only: each belief with a
// recorded origin is re-derived as normalize(phi * psi^T prior) with phi
// and prior held fixed.
GradientSet tbptt_gradients(std::span<const StepTrace> window, const ModelParams& params, const Vector& error);

// The windowed loss that tbptt_gradients differentiates, evaluated by
// re-running the window forward with `params`.
double windowed_loss(std::span<const StepTrace> window, const ModelParams& params, const Vector& target);

Matrix row_softmax(const Matrix& m);
ModelParams renormalize_transition(ModelParams params);

// theta <- theta - eta * g followed by the configured transition update.
void apply_gradient(ModelParams& params, const GradientSet& grads, double learning_rate, TransitionUpdate mode);

// Rescales `grads` in place so its global norm is at most max_norm.
// Returns the norm before clipping.
double clip_gradients(GradientSet& grads, double max_norm);

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
};

struct TrainReport {
    std::vector<EpochRecord> epochs;
    int best_epoch = 0;
    double best_val_loss = 0.0;
    bool stopped_early = false;
    std::vector<Vector> final_beliefs;  // filtered beliefs of the last training pass
};

struct TrainResult {
    ModelParams params;
    TrainReport report;
};

// Called after every parameter update with (epoch, step, params).
using StepObserver = std::function<void(int, std::size_t, const ModelParams&)>;

TrainResult train(const SeriesBundle& series, const Hyperparams& hp, const SwitchConfig& config,
                  const StepObserver& observer = {});

// Same loop starting from explicit parameters.
TrainResult train_from(const SeriesBundle& series, ModelParams initial, const Hyperparams& hp,
                       const SwitchConfig& config, const StepObserver& observer = {});

struct EvalResult {
    std::vector<Vector> predictions;  // model units, one per scored step
    std::vector<Vector> beliefs;      // filtered belief after each scored step
    ErrorMetrics metrics;
    double mean_loss = 0.0;           // mean e^T e
};

// Runs the model with switching but no updates from step 0 and scores
// steps [begin, end). Earlier steps only warm up the state.
EvalResult evaluate(const SeriesBundle& series, const ModelParams& params, const SwitchConfig& config,
                    std::size_t begin, std::size_t end);

}  // namespace mrnn
