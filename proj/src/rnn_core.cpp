#include "mrnn/rnn_core.hpp"

#include "mrnn/errors.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace mrnn {

ModelParams ModelParams::zeros(int num_regimes, int hidden_dim, int input_dim, int output_dim) {
    if (num_regimes < 1 || hidden_dim < 1 || input_dim < 1 || output_dim < 1)
        throw ConfigError("ModelParams::zeros: all dimensions must be positive");
    ModelParams p;
    p.regime_input_weights.assign(num_regimes, Matrix::Zero(hidden_dim, input_dim));
    p.regime_recurrent_weights.assign(num_regimes, Matrix::Zero(hidden_dim, hidden_dim));
    p.output_weights = Matrix::Zero(output_dim, hidden_dim);
    p.transition = Matrix::Identity(num_regimes, num_regimes);
    return p;
}

void ModelParams::validate() const {
    const auto k = regime_recurrent_weights.size();
    if (k == 0) throw ConfigError("model has no regimes");
    if (regime_input_weights.size() != k)
        throw ConfigError("regime input/recurrent weight lists differ in length");
    const auto nh = output_weights.cols();
    const auto nx = regime_input_weights.front().cols();
    if (nh < 1 || nx < 1 || output_weights.rows() < 1) throw ConfigError("model has an empty dimension");
    for (std::size_t r = 0; r < k; ++r) {
        require_shape(regime_input_weights[r], nh, nx, "regime_input_weights[" + std::to_string(r) + "]");
        require_shape(regime_recurrent_weights[r], nh, nh, "regime_recurrent_weights[" + std::to_string(r) + "]");
        if (!all_finite(regime_input_weights[r]) || !all_finite(regime_recurrent_weights[r]))
            throw NumericError("regime " + std::to_string(r) + " weights are not finite");
    }
    require_shape(transition, static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k), "transition");
    if (!all_finite(output_weights) || !all_finite(transition)) throw NumericError("model weights are not finite");
    for (Eigen::Index i = 0; i < transition.rows(); ++i) {
        if (transition.row(i).minCoeff() < 0.0 || transition.row(i).maxCoeff() > 1.0)
            throw StateError("transition row " + std::to_string(i) + " has entries outside [0, 1]");
        if (std::abs(transition.row(i).sum() - 1.0) > 1e-12)
            throw StateError("transition row " + std::to_string(i) + " does not sum to 1");
    }
}

void check_belief(const Vector& belief, int num_regimes) {
    require_size(belief, num_regimes, "belief");
    if (!all_finite(belief)) throw NumericError("belief is not finite");
    if (belief.minCoeff() < 0.0 || std::abs(belief.sum() - 1.0) > kBeliefTolerance) {
        std::ostringstream os;
        os << "belief is not a probability vector (sum " << belief.sum() << ", min " << belief.minCoeff() << ")";
        throw StateError(os.str());
    }
}

RegimeOutput regime_forward(const Vector& prev_hidden, const Vector& input, const ModelParams& params, int regime) {
    if (regime < 0 || regime >= params.num_regimes())
        throw ConfigError("regime index " + std::to_string(regime) + " out of range");
    const Matrix& w_in = params.regime_input_weights[regime];
    const Matrix& w_rec = params.regime_recurrent_weights[regime];
    require_size(prev_hidden, w_rec.cols(), "previous hidden state");
    require_size(input, w_in.cols(), "input");
    if (!all_finite(prev_hidden) || !all_finite(input)) throw NumericError("non-finite cell input");

    RegimeOutput out;
    out.preactivation.noalias() = w_rec * prev_hidden;
    out.preactivation.noalias() += w_in * input;
    out.hidden = out.preactivation.array().tanh();
    return out;
}

Vector combine_hidden(const std::vector<Vector>& regime_hidden, const Vector& belief) {
    check_belief(belief, static_cast<int>(regime_hidden.size()));
    Vector out = Vector::Zero(regime_hidden.front().size());
    for (std::size_t k = 0; k < regime_hidden.size(); ++k) out.noalias() += belief[static_cast<Eigen::Index>(k)] * regime_hidden[k];
    return out;
}

Vector output_map(const Vector& hidden, const ModelParams& params) {
    require_size(hidden, params.output_weights.cols(), "hidden state");
    return params.output_weights * hidden;
}

StepTrace cell_step(const CellState& prev, const Vector& belief, const Vector& input, const ModelParams& params) {
    const int k_count = params.num_regimes();
    StepTrace trace;
    trace.input = input;
    trace.prev_hidden = prev.hidden;
    trace.belief_used = belief;
    trace.regime_preactivations.reserve(k_count);
    trace.regime_hidden.reserve(k_count);
    trace.regime_predictions.reserve(k_count);
    for (int k = 0; k < k_count; ++k) {
        auto r = regime_forward(prev.hidden, input, params, k);
        trace.regime_predictions.push_back(output_map(r.hidden, params));
        trace.regime_preactivations.push_back(std::move(r.preactivation));
        trace.regime_hidden.push_back(std::move(r.hidden));
    }
    trace.combined_hidden = combine_hidden(trace.regime_hidden, belief);
    trace.combined_prediction = output_map(trace.combined_hidden, params);
    return trace;
}

}  // namespace mrnn
