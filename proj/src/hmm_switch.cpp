#include "mrnn/hmm_switch.hpp"

#include "mrnn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace mrnn {

std::string to_string(LikelihoodKind kind) {
    return kind == LikelihoodKind::gaussian ? "gaussian" : "laplacian_scalar";
}

LikelihoodKind likelihood_kind_from_string(const std::string& name) {
    if (name == "gaussian") return LikelihoodKind::gaussian;
    if (name == "laplacian_scalar" || name == "laplacian") return LikelihoodKind::laplacian_scalar;
    throw ConfigError("unknown likelihood kind '" + name + "'");
}

void SwitchConfig::validate() const {
    if (!(beta >= 0.0 && beta < 1.0)) throw ConfigError("beta must lie in [0, 1)");
    if (!(cov_floor > 0.0)) throw ConfigError("cov_floor must be positive");
    if (!(likelihood_floor > 0.0)) throw ConfigError("likelihood_floor must be positive");
}

SwitchState SwitchState::initial(int num_regimes, int output_dim) {
    SwitchState s;
    s.belief = Vector::Constant(num_regimes, 1.0 / num_regimes);
    s.error_covariances.assign(num_regimes, Matrix::Identity(output_dim, output_dim));
    s.last_likelihoods = Vector::Ones(num_regimes);
    s.last_regime_errors.assign(num_regimes, Vector::Zero(output_dim));
    return s;
}

double gaussian_log_likelihood(const Vector& error, const Matrix& covariance) {
    const auto n = error.size();
    require_shape(covariance, n, n, "error covariance");
    Eigen::LLT<Matrix> llt(covariance);
    if (llt.info() != Eigen::Success) throw NumericError("error covariance is not positive definite");
    const Matrix& l = llt.matrixL();
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(l(i, i) > 0.0)) throw NumericError("error covariance is not positive definite");
        log_det += 2.0 * std::log(l(i, i));
    }
    const Vector w = llt.matrixL().solve(error);
    const double quad = w.squaredNorm();
    return -0.5 * (static_cast<double>(n) * std::log(2.0 * std::numbers::pi) + log_det + quad);
}

double gaussian_likelihood(const Vector& error, const Matrix& covariance) {
    return std::exp(gaussian_log_likelihood(error, covariance));
}

double laplacian_log_likelihood_scalar(double error, double scale) {
    if (!(scale > 0.0)) throw NumericError("Laplacian scale must be positive");
    return -std::log(2.0 * scale) - std::abs(error) / scale;
}

double laplacian_likelihood_scalar(double error, double scale) {
    return std::exp(laplacian_log_likelihood_scalar(error, scale));
}

Vector belief_update(const Vector& belief_prev, const Vector& likelihoods, const Matrix& transition,
                     double likelihood_floor) {
    const auto k = belief_prev.size();
    require_size(likelihoods, k, "likelihoods");
    require_shape(transition, k, k, "transition");
    if (!all_finite(likelihoods) || likelihoods.minCoeff() < 0.0)
        throw NumericError("likelihoods must be finite and non-negative");

    const Vector predicted = transition.transpose() * belief_prev;
    Vector unnormalized = likelihoods.cwiseProduct(predicted);
    double total = unnormalized.sum();
    if (!(total >= likelihood_floor * static_cast<double>(k))) {
        unnormalized = likelihoods.cwiseMax(likelihood_floor).cwiseProduct(predicted);
        total = unnormalized.sum();
    }
    if (!(total > 0.0)) throw NumericError("belief update has zero total mass");
    return unnormalized / total;
}

Matrix update_error_cov(const Matrix& cov_prev, const Vector& error, double beta, double cov_floor) {
    const auto n = error.size();
    require_shape(cov_prev, n, n, "error covariance");
    Matrix next = (1.0 - beta) * cov_prev;
    next.noalias() += beta * error * error.transpose();
    next = 0.5 * (next + next.transpose()).eval();
    const double smallest = min_eigenvalue(next);
    if (smallest < cov_floor) {
        // Roundoff margin keeps the shifted spectrum at or above the floor.
        const double margin = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, next.norm());
        next.diagonal().array() += (cov_floor - smallest) + margin;
    }
    return next;
}

SwitchState switch_step(const SwitchState& state, const std::vector<Vector>& regime_predictions,
                        const Vector& target, const Matrix& transition, const SwitchConfig& config) {
    const auto k_count = static_cast<Eigen::Index>(regime_predictions.size());
    require_size(state.belief, k_count, "belief");
    if (static_cast<Eigen::Index>(state.error_covariances.size()) != k_count)
        throw ConfigError("switch state has the wrong number of covariances");
    const auto n_y = target.size();
    if (config.likelihood == LikelihoodKind::laplacian_scalar && n_y != 1)
        throw UnsupportedError("Laplacian likelihood is only available for scalar targets");

    SwitchState next;
    next.last_regime_errors.resize(k_count);
    Vector log_lik(k_count);
    for (Eigen::Index k = 0; k < k_count; ++k) {
        require_size(regime_predictions[k], n_y, "regime prediction");
        next.last_regime_errors[k] = target - regime_predictions[k];
        const Matrix& cov = state.error_covariances[k];
        try {
            log_lik[k] = config.likelihood == LikelihoodKind::gaussian
                             ? gaussian_log_likelihood(next.last_regime_errors[k], cov)
                             : laplacian_log_likelihood_scalar(next.last_regime_errors[k][0], cov(0, 0));
        } catch (const NumericError& e) {
            std::ostringstream os;
            os << "regime " << k << ": " << e.what();
            throw NumericError(os.str());
        }
    }
    if (!all_finite(log_lik)) throw NumericError("non-finite regime log-likelihood");

    // Normalization invariance lets us rescale by the largest likelihood.
    next.last_likelihoods = (log_lik.array() - log_lik.maxCoeff()).exp();
    next.belief = belief_update(state.belief, next.last_likelihoods, transition, config.likelihood_floor);

    next.error_covariances.reserve(k_count);
    for (Eigen::Index k = 0; k < k_count; ++k)
        next.error_covariances.push_back(
            update_error_cov(state.error_covariances[k], next.last_regime_errors[k], config.beta, config.cov_floor));
    return next;
}

}  // namespace mrnn
