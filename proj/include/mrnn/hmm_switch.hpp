#pragma once

// HMM gating for the multi-regime cell: per-regime error likelihoods,
// the forward-filter belief update and exponentially smoothed per-regime
// error covariances.

#include "mrnn/linalg.hpp"

#include <string>
#include <vector>

namespace mrnn {

enum class LikelihoodKind { gaussian, laplacian_scalar };

std::string to_string(LikelihoodKind kind);
LikelihoodKind likelihood_kind_from_string(const std::string& name);

struct SwitchConfig {
    double beta = 0.7;  // covariance smoothing, in [0, 1)
    LikelihoodKind likelihood = LikelihoodKind::gaussian;
    double cov_floor = 1e-6;
    double likelihood_floor = 1e-300;

    void validate() const;
};

struct SwitchState {
    Vector belief;
    std::vector<Matrix> error_covariances;
    // Likelihoods of the last update, rescaled so the largest entry is 1.
    Vector last_likelihoods;
    std::vector<Vector> last_regime_errors;

    // Uniform belief and identity covariances.
    static SwitchState initial(int num_regimes, int output_dim);
};

double gaussian_log_likelihood(const Vector& error, const Matrix& covariance);
double gaussian_likelihood(const Vector& error, const Matrix& covariance);

double laplacian_log_likelihood_scalar(double error, double scale);
double laplacian_likelihood_scalar(double error, double scale);

// Normalized phi * (transition^T belief_prev). Falls back to floored
// likelihoods when the unnormalized mass drops below floor * K.
Vector belief_update(const Vector& belief_prev, const Vector& likelihoods, const Matrix& transition,
                     double likelihood_floor = 1e-300);

// (1 - beta) * cov + beta * e e^T, symmetrized, then shifted by a multiple
// of the identity if its smallest eigenvalue fell below cov_floor.
Matrix update_error_cov(const Matrix& cov_prev, const Vector& error, double beta, double cov_floor = 1e-6);

// One filter step: regime errors, likelihoods under the previous
// covariances, belief update, covariance update, in that order.
SwitchState switch_step(const SwitchState& state, const std::vector<Vector>& regime_predictions,
                        const Vector& target, const Matrix& transition, const SwitchConfig& config);

}  // namespace mrnn
