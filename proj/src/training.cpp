#include "mrnn/training.hpp"

#include "mrnn/errors.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace mrnn {

std::string to_string(TransitionUpdate mode) {
    switch (mode) {
        case TransitionUpdate::softmax: return "softmax";
        case TransitionUpdate::logit: return "logit";
        case TransitionUpdate::fixed: return "fixed";
    }
    return "unknown";
}

TransitionUpdate transition_update_from_string(const std::string& name) {
    if (name == "softmax") return TransitionUpdate::softmax;
    if (name == "logit") return TransitionUpdate::logit;
    if (name == "fixed") return TransitionUpdate::fixed;
    throw ConfigError("unknown transition update '" + name + "'");
}

void Hyperparams::validate() const {
    if (num_regimes < 1) throw ConfigError("num_regimes must be >= 1");
    if (hidden_dim < 1) throw ConfigError("hidden_dim must be >= 1");
    if (truncation < 1) throw ConfigError("truncation must be >= 1");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning_rate must be >= 0");
    if (!(dirichlet_rho0 > 0.0 && dirichlet_rho0 < 1.0)) throw ConfigError("dirichlet_rho0 must lie in (0, 1)");
    if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
    if (early_stop_tolerance < 0) throw ConfigError("early_stop_tolerance must be >= 0");
    if (!std::isfinite(clip_norm)) throw ConfigError("clip_norm must be finite");
}

GradientSet GradientSet::zeros_like(const ModelParams& params) {
    GradientSet g;
    for (const auto& w : params.regime_input_weights) g.d_regime_input_weights.push_back(Matrix::Zero(w.rows(), w.cols()));
    for (const auto& w : params.regime_recurrent_weights)
        g.d_regime_recurrent_weights.push_back(Matrix::Zero(w.rows(), w.cols()));
    g.d_output_weights = Matrix::Zero(params.output_weights.rows(), params.output_weights.cols());
    g.d_transition = Matrix::Zero(params.transition.rows(), params.transition.cols());
    return g;
}

double GradientSet::squared_norm() const {
    double s = d_output_weights.squaredNorm() + d_transition.squaredNorm();
    for (const auto& m : d_regime_input_weights) s += m.squaredNorm();
    for (const auto& m : d_regime_recurrent_weights) s += m.squaredNorm();
    return s;
}

void GradientSet::scale(double factor) {
    d_output_weights *= factor;
    d_transition *= factor;
    for (auto& m : d_regime_input_weights) m *= factor;
    for (auto& m : d_regime_recurrent_weights) m *= factor;
}

ModelParams init_params(const Hyperparams& hp, int input_dim, int output_dim) {
    hp.validate();
    if (input_dim < 1 || output_dim < 1) throw ConfigError("input and output dimensions must be positive");
    const int k_count = hp.num_regimes;
    const int nh = hp.hidden_dim;
    std::mt19937_64 engine(hp.seed);

    auto xavier = [&engine](Eigen::Index rows, Eigen::Index cols) {
        const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
        std::uniform_real_distribution<double> dist(-bound, bound);
        Matrix m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = dist(engine);
        return m;
    };

    ModelParams p;
    for (int k = 0; k < k_count; ++k) {
        p.regime_input_weights.push_back(xavier(nh, input_dim));
        p.regime_recurrent_weights.push_back(xavier(nh, nh));
    }
    p.output_weights = xavier(output_dim, nh);

    p.transition = Matrix::Identity(k_count, k_count);
    if (k_count > 1) {
        const double off = (1.0 - hp.dirichlet_rho0) / (k_count - 1);
        for (int row = 0; row < k_count; ++row) {
            double total = 0.0;
            while (!(total > 0.0)) {
                total = 0.0;
                for (int col = 0; col < k_count; ++col) {
                    std::gamma_distribution<double> gamma(col == row ? hp.dirichlet_rho0 : off, 1.0);
                    p.transition(row, col) = gamma(engine);
                    total += p.transition(row, col);
                }
            }
            p.transition.row(row) /= total;
        }
    }
    return p;
}

namespace {

struct Rederived {
    Vector belief;
    double mass = 0.0;
};

Rederived rederive_belief(const BeliefOrigin& origin, const Matrix& transition) {
    Vector unnormalized = origin.likelihoods.cwiseProduct(transition.transpose() * origin.prior_belief);
    const double mass = unnormalized.sum();
    if (!(mass > 0.0)) throw NumericError("belief origin has zero mass under the current transition matrix");
    return {unnormalized / mass, mass};
}

}  // namespace

GradientSet tbptt_gradients(std::span<const StepTrace> window, const ModelParams& params, const Vector& error) {
    if (window.empty()) throw ConfigError("gradient window is empty");
    const StepTrace& last = window.back();
    require_size(error, params.output_dim(), "window error");
    GradientSet g = GradientSet::zeros_like(params);
    const int k_count = params.num_regimes();

    g.d_output_weights.noalias() = -2.0 * error * last.combined_hidden.transpose();
    Vector delta = -2.0 * params.output_weights.transpose() * error;  // dl/dh_t

    Vector delta_prev(params.hidden_dim());
    Vector dbelief(k_count);
    for (auto it = window.rbegin(); it != window.rend(); ++it) {
        const StepTrace& tr = *it;
        delta_prev.setZero();
        for (int k = 0; k < k_count; ++k) {
            const Vector& hk = tr.regime_hidden[k];
            dbelief[k] = delta.dot(hk);
            const Vector gz = tr.belief_used[k] * delta.cwiseProduct((1.0 - hk.array().square()).matrix());
            g.d_regime_input_weights[k].noalias() += gz * tr.input.transpose();
            g.d_regime_recurrent_weights[k].noalias() += gz * tr.prev_hidden.transpose();
            delta_prev.noalias() += params.regime_recurrent_weights[k].transpose() * gz;
        }
        if (tr.belief_origin) {
            const auto& origin = *tr.belief_origin;
            const auto [belief, mass] = rederive_belief(origin, params.transition);
            // Normalization Jacobian, then d(alpha_tilde_j)/d(psi_ij) = phi_j * prior_i.
            const Vector dunnorm = (dbelief.array() - dbelief.dot(belief)) / mass;
            g.d_transition.noalias() += origin.prior_belief * dunnorm.cwiseProduct(origin.likelihoods).transpose();
        }
        delta.swap(delta_prev);
    }
    return g;
}

double windowed_loss(std::span<const StepTrace> window, const ModelParams& params, const Vector& target) {
    if (window.empty()) throw ConfigError("loss window is empty");
    CellState state{window.front().prev_hidden, Vector()};
    for (const auto& tr : window) {
        const Vector belief = tr.belief_origin ? rederive_belief(*tr.belief_origin, params.transition).belief
                                               : tr.belief_used;
        state.hidden = cell_step(state, belief, tr.input, params).combined_hidden;
    }
    return (target - output_map(state.hidden, params)).squaredNorm();
}

Matrix row_softmax(const Matrix& m) {
    Matrix out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const double top = m.row(i).maxCoeff();
        out.row(i) = (m.row(i).array() - top).exp();
        out.row(i) /= out.row(i).sum();
    }
    return out;
}

ModelParams renormalize_transition(ModelParams params) {
    if (!all_finite(params.transition)) throw NumericError("transition matrix is not finite");
    params.transition = row_softmax(params.transition);
    return params;
}

void apply_gradient(ModelParams& params, const GradientSet& grads, double learning_rate, TransitionUpdate mode) {
    for (std::size_t k = 0; k < params.regime_input_weights.size(); ++k) {
        params.regime_input_weights[k].noalias() -= learning_rate * grads.d_regime_input_weights[k];
        params.regime_recurrent_weights[k].noalias() -= learning_rate * grads.d_regime_recurrent_weights[k];
    }
    params.output_weights.noalias() -= learning_rate * grads.d_output_weights;
    if (mode == TransitionUpdate::fixed) return;
    if (mode == TransitionUpdate::softmax) {
        params.transition.noalias() -= learning_rate * grads.d_transition;
        params.transition = row_softmax(params.transition);
    } else {
        // psi = softmax(logits) with logits = log(psi) up to a row shift, so
        // dl/dlogit_ij = psi_ij * (g_ij - sum_j' psi_ij' g_ij').
        const Matrix& psi = params.transition;
        const Vector row_dot = psi.cwiseProduct(grads.d_transition).rowwise().sum();
        const Matrix d_logits = psi.cwiseProduct(grads.d_transition - row_dot.replicate(1, psi.cols()));
        Matrix logits = psi.array().log().matrix();
        logits.noalias() -= learning_rate * d_logits;
        params.transition = row_softmax(logits);
    }
}

double clip_gradients(GradientSet& grads, double max_norm) {
    const double norm = std::sqrt(grads.squared_norm());
    if (max_norm > 0.0 && norm > max_norm) grads.scale(max_norm / norm);
    return norm;
}

namespace {

void require_trainable(const SeriesBundle& series) {
    series.validate();
    if (!series.split) throw ConfigError("training needs split boundaries");
    if (series.split->train_end == 0) throw ConfigError("training segment is empty");
    if (series.split->val_end <= series.split->train_end) throw ConfigError("validation segment is empty");
}

}  // namespace

TrainResult train(const SeriesBundle& series, const Hyperparams& hp, const SwitchConfig& config,
                  const StepObserver& observer) {
    require_trainable(series);
    return train_from(series, init_params(hp, series.feature_dim() + 1, series.output_dim()), hp, config, observer);
}

TrainResult train_from(const SeriesBundle& series, ModelParams params, const Hyperparams& hp,
                       const SwitchConfig& config, const StepObserver& observer) {
    hp.validate();
    config.validate();
    require_trainable(series);
    params.validate();
    if (params.input_dim() != series.feature_dim() + 1 || params.output_dim() != series.output_dim())
        throw ConfigError("model dimensions do not match the series");
    if (params.num_regimes() != hp.num_regimes || params.hidden_dim() != hp.hidden_dim)
        throw ConfigError("model shape does not match the hyperparameters");

    const std::size_t train_end = series.split->train_end;
    const std::size_t val_end = series.split->val_end;
    const auto window_len = static_cast<std::size_t>(hp.truncation) + 1;

    std::vector<Vector> inputs;
    inputs.reserve(train_end);
    for (std::size_t t = 0; t < train_end; ++t) inputs.push_back(with_bias(series.inputs[t]));

    TrainResult result;
    result.params = params;
    double best = std::numeric_limits<double>::infinity();
    int since_best = 0;

    for (int epoch = 1; epoch <= hp.max_epochs; ++epoch) {
        CellState cell = CellState::zeros(hp.hidden_dim);
        SwitchState sw = SwitchState::initial(hp.num_regimes, series.output_dim());
        std::optional<BeliefOrigin> origin;
        std::vector<StepTrace> window;
        window.reserve(window_len);
        std::vector<Vector> beliefs;
        beliefs.reserve(train_end);
        double loss_sum = 0.0;

        for (std::size_t t = 0; t < train_end; ++t) {
            StepTrace trace = cell_step(cell, sw.belief, inputs[t], params);
            trace.belief_origin = std::move(origin);
            const Vector& target = series.targets[t];
            const Vector error = target - trace.combined_prediction;
            const double loss = error.squaredNorm();
            if (!std::isfinite(loss)) {
                std::ostringstream os;
                os << "training diverged: non-finite loss at epoch " << epoch << ", step " << t;
                throw NumericError(os.str());
            }
            loss_sum += loss;

            if (window.size() == window_len) window.erase(window.begin());
            window.push_back(std::move(trace));
            GradientSet grads = tbptt_gradients(window, params, error);
            clip_gradients(grads, hp.clip_norm);
            apply_gradient(params, grads, hp.learning_rate, hp.transition_update);

            const StepTrace& current = window.back();
            SwitchState next = switch_step(sw, current.regime_predictions, target, params.transition, config);
            origin = BeliefOrigin{sw.belief, next.last_likelihoods};
            sw = std::move(next);
            cell.hidden = current.combined_hidden;
            beliefs.push_back(sw.belief);
            if (observer) observer(epoch, t, params);
        }

        const EvalResult val = evaluate(series, params, config, train_end, val_end);
        const double train_loss = loss_sum / static_cast<double>(train_end);
        if (!std::isfinite(val.mean_loss)) {
            std::ostringstream os;
            os << "training diverged: non-finite validation loss at epoch " << epoch;
            throw NumericError(os.str());
        }
        result.report.epochs.push_back({epoch, train_loss, val.mean_loss});
        result.report.final_beliefs = std::move(beliefs);

        if (val.mean_loss < best) {
            best = val.mean_loss;
            result.params = params;
            result.report.best_epoch = epoch;
            result.report.best_val_loss = best;
            since_best = 0;
        } else {
            ++since_best;
        }
        if (since_best > hp.early_stop_tolerance) {
            result.report.stopped_early = true;
            break;
        }
    }
    return result;
}

EvalResult evaluate(const SeriesBundle& series, const ModelParams& params, const SwitchConfig& config,
                    std::size_t begin, std::size_t end) {
    series.validate();
    config.validate();
    if (begin >= end || end > series.size()) throw ConfigError("evaluation range is empty or out of bounds");
    if (params.input_dim() != series.feature_dim() + 1 || params.output_dim() != series.output_dim())
        throw ConfigError("model dimensions do not match the series");

    EvalResult out;
    out.predictions.reserve(end - begin);
    out.beliefs.reserve(end - begin);
    CellState cell = CellState::zeros(params.hidden_dim());
    SwitchState sw = SwitchState::initial(params.num_regimes(), params.output_dim());
    double loss_sum = 0.0;
    std::vector<Vector> targets;
    targets.reserve(end - begin);
    for (std::size_t t = 0; t < end; ++t) {
        const StepTrace trace = cell_step(cell, sw.belief, with_bias(series.inputs[t]), params);
        sw = switch_step(sw, trace.regime_predictions, series.targets[t], params.transition, config);
        cell.hidden = trace.combined_hidden;
        if (t >= begin) {
            loss_sum += (series.targets[t] - trace.combined_prediction).squaredNorm();
            out.predictions.push_back(trace.combined_prediction);
            out.beliefs.push_back(sw.belief);
            targets.push_back(series.targets[t]);
        }
    }
    out.mean_loss = loss_sum / static_cast<double>(end - begin);
    out.metrics = compute_metrics(out.predictions, targets);
    return out;
}

}  // namespace mrnn
