#pragma once

// Random instances shared by the unit and acceptance tests.

#include "mrnn/hmm_switch.hpp"
#include "mrnn/rnn_core.hpp"
#include "mrnn/series.hpp"
#include "mrnn/training.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace fixture {

using mrnn::Matrix;
using mrnn::Vector;

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
    return m;
}

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double scale) {
    return random_matrix(rng, n, 1, scale);
}

inline Matrix random_stochastic(std::mt19937_64& rng, int k) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    Matrix m(k, k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) m(i, j) = u(rng);
        m.row(i) /= m.row(i).sum();
    }
    return m;
}

inline Vector random_belief(std::mt19937_64& rng, int k) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    Vector b(k);
    for (int i = 0; i < k; ++i) b[i] = u(rng);
    return b / b.sum();
}

inline mrnn::ModelParams random_params(std::mt19937_64& rng, int k, int nh, int nx, int ny, double scale = 0.8) {
    mrnn::ModelParams p;
    for (int r = 0; r < k; ++r) {
        p.regime_input_weights.push_back(random_matrix(rng, nh, nx, scale));
        p.regime_recurrent_weights.push_back(random_matrix(rng, nh, nh, scale));
    }
    p.output_weights = random_matrix(rng, ny, nh, scale);
    p.transition = random_stochastic(rng, k);
    return p;
}

struct Window {
    std::vector<mrnn::StepTrace> traces;
    Vector target;
    Vector error;
};

// Rolls cell and filter forward for a few steps the way training does and
// keeps the trailing truncation + 1 traces. Every trace after the first
// rollout step carries a belief origin.
inline Window random_window(std::mt19937_64& rng, const mrnn::ModelParams& p, int truncation, int warmup = 3) {
    const int nx = p.input_dim();
    const int ny = p.output_dim();
    mrnn::CellState cell{random_vector(rng, p.hidden_dim(), 0.5), Vector()};
    mrnn::SwitchState sw = mrnn::SwitchState::initial(p.num_regimes(), ny);
    sw.belief = random_belief(rng, p.num_regimes());
    mrnn::SwitchConfig cfg;
    std::optional<mrnn::BeliefOrigin> origin;
    Window w;
    const int steps = truncation + 1 + warmup;
    for (int t = 0; t < steps; ++t) {
        Vector x = random_vector(rng, nx, 1.0);
        x[nx - 1] = 1.0;
        mrnn::StepTrace tr = mrnn::cell_step(cell, sw.belief, x, p);
        tr.belief_origin = origin;
        const Vector y = random_vector(rng, ny, 1.0);
        mrnn::SwitchState next = mrnn::switch_step(sw, tr.regime_predictions, y, p.transition, cfg);
        origin = mrnn::BeliefOrigin{sw.belief, next.last_likelihoods};
        sw = next;
        cell.hidden = tr.combined_hidden;
        if (static_cast<int>(w.traces.size()) == truncation + 1) w.traces.erase(w.traces.begin());
        w.traces.push_back(tr);
        w.target = y;
    }
    w.error = w.target - w.traces.back().combined_prediction;
    return w;
}

// Short labeled series with a 60/20/20 split.
inline mrnn::SeriesBundle random_series(std::mt19937_64& rng, std::size_t length, int nx, int ny) {
    mrnn::SeriesBundle s;
    for (std::size_t t = 0; t < length; ++t) {
        s.inputs.push_back(random_vector(rng, nx, 1.0));
        s.targets.push_back(random_vector(rng, ny, 1.0));
    }
    s.split = mrnn::Split{length * 6 / 10, length * 8 / 10};
    return s;
}

// Fresh scratch directory under the system temp dir.
inline std::string scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("mrnn_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

}  // namespace fixture
