#include "fixtures.hpp"
#include "oracles.hpp"

#include "mrnn/errors.hpp"
#include "mrnn/rnn_core.hpp"

#include <doctest.h>

#include <cmath>

using namespace mrnn;

namespace {

ModelParams scalar_params(double w_rec, double w_in) {
    ModelParams p = ModelParams::zeros(1, 1, 1, 1);
    p.regime_recurrent_weights[0](0, 0) = w_rec;
    p.regime_input_weights[0](0, 0) = w_in;
    return p;
}

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

}  // namespace

TEST_CASE("regime_forward with zero weights gives a zero hidden state") {
    const ModelParams p = ModelParams::zeros(2, 3, 2, 1);
    const RegimeOutput out = regime_forward(vec({0.3, -0.7, 0.9}), vec({1.5, 1.0}), p, 1);
    CHECK(out.hidden.isZero(0.0));
    CHECK(out.preactivation.isZero(0.0));
}

TEST_CASE("regime_forward scalar case") {
    const ModelParams p = scalar_params(0.5, 1.0);
    const RegimeOutput out = regime_forward(vec({0.2}), vec({0.3}), p, 0);
    CHECK(out.preactivation[0] == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(out.hidden[0] == doctest::Approx(std::tanh(0.4)).epsilon(1e-15));
    CHECK(out.hidden[0] == doctest::Approx(0.379949).epsilon(1e-6));
}

TEST_CASE("a zero recurrent row pins that hidden coordinate at zero") {
    std::mt19937_64 rng(3);
    ModelParams p = fixture::random_params(rng, 1, 3, 2, 1);
    p.regime_input_weights[0].setZero();
    p.regime_recurrent_weights[0].row(1).setZero();
    for (int trial = 0; trial < 5; ++trial) {
        const RegimeOutput out = regime_forward(fixture::random_vector(rng, 3, 1.0), fixture::random_vector(rng, 2, 1.0), p, 0);
        CHECK(out.hidden[1] == 0.0);
    }
}

TEST_CASE("regime_forward rejects bad shapes, regimes and values") {
    const ModelParams p = ModelParams::zeros(2, 3, 2, 1);
    CHECK_THROWS_AS(regime_forward(vec({0, 0}), vec({1, 1}), p, 0), ConfigError);
    CHECK_THROWS_AS(regime_forward(vec({0, 0, 0}), vec({1}), p, 0), ConfigError);
    CHECK_THROWS_AS(regime_forward(vec({0, 0, 0}), vec({1, 1}), p, 2), ConfigError);
    CHECK_THROWS_AS(regime_forward(vec({0, 0, 0}), vec({NAN, 1}), p, 0), NumericError);
}

TEST_CASE("combine_hidden examples") {
    const std::vector<Vector> hs{vec({1, 0}), vec({0, 1})};
    CHECK(combine_hidden(hs, vec({0.0, 1.0})) == hs[1]);
    CHECK(combine_hidden(hs, vec({0.5, 0.5})).isApprox(vec({0.5, 0.5}), 1e-15));
    const Vector mixed = combine_hidden({vec({0.2}), vec({-0.4})}, vec({0.7, 0.3}));
    CHECK(mixed[0] == doctest::Approx(0.02).epsilon(1e-12));
}

TEST_CASE("combine_hidden rejects unnormalized beliefs") {
    const std::vector<Vector> hs{vec({1, 0}), vec({0, 1})};
    CHECK_THROWS_AS(combine_hidden(hs, vec({0.6, 0.6})), StateError);
    CHECK_THROWS_AS(combine_hidden(hs, vec({1.2, -0.2})), StateError);
}

TEST_CASE("combine_hidden is linear in the belief") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const std::vector<Vector> hs{fixture::random_vector(rng, 4, 1.0), fixture::random_vector(rng, 4, 1.0),
                                     fixture::random_vector(rng, 4, 1.0)};
        const Vector a = fixture::random_belief(rng, 3), b = fixture::random_belief(rng, 3);
        const double w = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const Vector lhs = combine_hidden(hs, w * a + (1.0 - w) * b);
        const Vector rhs = w * combine_hidden(hs, a) + (1.0 - w) * combine_hidden(hs, b);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("output_map examples") {
    ModelParams p = ModelParams::zeros(1, 2, 1, 1);
    CHECK(output_map(Vector::Zero(2), p).isZero(0.0));
    p.output_weights << 1.0, -1.0;
    CHECK(output_map(vec({0.3, 0.1}), p)[0] == doctest::Approx(0.2).epsilon(1e-15));
    ModelParams q = ModelParams::zeros(1, 3, 1, 3);
    q.output_weights.setIdentity();
    const Vector h = vec({0.1, -0.2, 0.3});
    CHECK(output_map(h, q) == h);
    CHECK_THROWS_AS(output_map(vec({1, 2, 3}), p), ConfigError);
}

TEST_CASE("cell_step with one regime is a vanilla RNN step") {
    std::mt19937_64 rng(5);
    const ModelParams p = fixture::random_params(rng, 1, 4, 3, 2);
    CellState state = CellState::zeros(4);
    for (int t = 0; t < 30; ++t) {
        const Vector x = fixture::random_vector(rng, 3, 2.0);
        const StepTrace tr = cell_step(state, vec({1.0}), x, p);
        CHECK(tr.combined_hidden == tr.regime_hidden[0]);
        const Vector h = oracle::tanh_affine(p.regime_input_weights[0], x, p.regime_recurrent_weights[0], state.hidden);
        CHECK((tr.combined_hidden - h).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((tr.combined_prediction - oracle::mat_vec(p.output_weights, h)).cwiseAbs().maxCoeff() <= 1e-12);
        state.hidden = tr.combined_hidden;
    }
}

TEST_CASE("cell_step with zero weights predicts zero") {
    const ModelParams p = ModelParams::zeros(3, 4, 2, 2);
    const StepTrace tr = cell_step(CellState::zeros(4), Vector::Constant(3, 1.0 / 3), vec({0.5, 1.0}), p);
    CHECK(tr.combined_prediction.isZero(0.0));
    for (const auto& y : tr.regime_predictions) CHECK(y.isZero(0.0));
}

TEST_CASE("cell_step matches the straight-line oracle and keeps its invariants") {
    std::mt19937_64 rng(21);
    const ModelParams p = fixture::random_params(rng, 3, 5, 3, 2, 1.5);
    CellState state = CellState::zeros(5);
    for (int t = 0; t < 100; ++t) {
        const Vector belief = fixture::random_belief(rng, 3);
        const Vector x = fixture::random_vector(rng, 3, 3.0);
        const StepTrace tr = cell_step(state, belief, x, p);
        const oracle::Step ref = oracle::cell(p, state.hidden, belief, x);
        CHECK((tr.combined_hidden - ref.hidden).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((tr.combined_prediction - ref.prediction).cwiseAbs().maxCoeff() <= 1e-12);
        for (int k = 0; k < 3; ++k) {
            CHECK(tr.regime_hidden[k] == tr.regime_preactivations[k].array().tanh().matrix());
            CHECK(tr.regime_hidden[k].cwiseAbs().maxCoeff() < 1.0);
            CHECK((tr.regime_predictions[k] - oracle::mat_vec(p.output_weights, ref.regime_hidden[k])).cwiseAbs().maxCoeff() <= 1e-12);
        }
        CHECK(tr.combined_hidden.cwiseAbs().maxCoeff() < 1.0);
        CHECK(std::abs(tr.belief_used.sum() - 1.0) <= 1e-10);
        CHECK(tr.input == x);
        CHECK(tr.prev_hidden == state.hidden);
        state.hidden = tr.combined_hidden;
    }
}

TEST_CASE("permuting regimes with the belief leaves the step unchanged") {
    std::mt19937_64 rng(8);
    const ModelParams p = fixture::random_params(rng, 3, 4, 2, 2);
    const std::vector<int> perm{2, 0, 1};
    ModelParams q = p;
    for (int k = 0; k < 3; ++k) {
        q.regime_input_weights[k] = p.regime_input_weights[perm[k]];
        q.regime_recurrent_weights[k] = p.regime_recurrent_weights[perm[k]];
        for (int j = 0; j < 3; ++j) q.transition(k, j) = p.transition(perm[k], perm[j]);
    }
    CellState a = CellState::zeros(4), b = CellState::zeros(4);
    for (int t = 0; t < 20; ++t) {
        const Vector belief = fixture::random_belief(rng, 3);
        Vector permuted(3);
        for (int k = 0; k < 3; ++k) permuted[k] = belief[perm[k]];
        const Vector x = fixture::random_vector(rng, 2, 1.0);
        const StepTrace ta = cell_step(a, belief, x, p);
        const StepTrace tb = cell_step(b, permuted, x, q);
        CHECK((ta.combined_hidden - tb.combined_hidden).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((ta.combined_prediction - tb.combined_prediction).cwiseAbs().maxCoeff() <= 1e-12);
        a.hidden = ta.combined_hidden;
        b.hidden = tb.combined_hidden;
    }
}

TEST_CASE("ModelParams::validate enforces its invariants") {
    ModelParams p = ModelParams::zeros(2, 3, 2, 1);
    CHECK_NOTHROW(p.validate());
    ModelParams bad = p;
    bad.transition(0, 0) = 0.7;
    CHECK_THROWS(bad.validate());
    bad = p;
    bad.transition << 1.2, -0.2, 0.0, 1.0;
    CHECK_THROWS(bad.validate());
    bad = p;
    bad.output_weights(0, 1) = INFINITY;
    CHECK_THROWS_AS(bad.validate(), NumericError);
    bad = p;
    bad.regime_recurrent_weights.pop_back();
    CHECK_THROWS(bad.validate());
}
