#include "mrnn/datagen.hpp"
#include "mrnn/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace mrnn;

namespace {

Matrix two_state(double p11, double p22) {
    Matrix m(2, 2);
    m << p11, 1.0 - p11, 1.0 - p22, p22;
    return m;
}

double value(const SeriesBundle& s, std::size_t t) { return s.inputs[t][0]; }

void check_targets_are_next_inputs(const SeriesBundle& s) {
    for (std::size_t t = 0; t + 1 < s.size(); ++t) REQUIRE(s.targets[t][0] == s.inputs[t + 1][0]);
}

}  // namespace

TEST_CASE("deterministic switching labels flip at the segment boundary") {
    const SeriesBundle s = gen_ar_deterministic(5000, 0.1, 1);
    CHECK(s.size() == 5000);
    CHECK((*s.regime_labels)[499] == 1);
    CHECK((*s.regime_labels)[500] == 2);
    CHECK((*s.regime_labels)[999] == 2);
    CHECK((*s.regime_labels)[1000] == 1);
    check_targets_are_next_inputs(s);
}

TEST_CASE("deterministic switching follows its recursions given the documented noise stream") {
    const double sigma = 0.1;
    const SeriesBundle s = gen_ar_deterministic(3000, sigma, 77);
    NormalSource noise(77);
    double x = sigma * noise.normal();
    CHECK(value(s, 0) == x);
    for (std::size_t t = 0; t + 1 < s.size(); ++t) {
        const double eps = sigma * noise.normal();
        x = (*s.regime_labels)[t] == 1 ? x + eps : -0.9 * x + eps;
        REQUIRE(std::abs(value(s, t + 1) - x) <= 1e-12);
    }
}

TEST_CASE("noiseless deterministic switching") {
    const SeriesBundle s = gen_ar_deterministic(2000, 0.0, 5);
    for (std::size_t t = 0; t + 1 < s.size(); ++t) {
        if ((*s.regime_labels)[t] == 1) CHECK(value(s, t + 1) == value(s, t));
        else CHECK(value(s, t + 1) == -0.9 * value(s, t));
    }
    // A regime-2 segment entered at |v| <= 10 decays to v * 0.9^500.
    double v = 10.0;
    for (int i = 0; i < 500; ++i) v *= -0.9;
    CHECK(std::abs(v) < 1e-20);
}

TEST_CASE("Markov AR with an absorbing chain keeps its initial regime") {
    const SeriesBundle s = gen_ar_markov(500, {{0.95, 0.5, -0.5}, {0.95, -0.5, 0.5}}, Matrix::Identity(2, 2), 0.1, 3, 1);
    for (int l : *s.regime_labels) CHECK(l == 1);
    check_targets_are_next_inputs(s);
}

TEST_CASE("Markov AR with zero coefficients and no noise stays at zero") {
    const SeriesBundle s = gen_ar_markov(200, {{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}, two_state(0.9, 0.9), 0.0, 3);
    for (std::size_t t = 0; t < s.size(); ++t) CHECK(value(s, t) == 0.0);
}

TEST_CASE("Markov AR recursion reproduces from the documented noise stream") {
    const std::vector<std::vector<double>> c{{0.95, 0.5, -0.5}, {0.95, -0.5, 0.5}};
    const SeriesBundle s = gen_ar_markov(400, c, two_state(0.98, 0.98), 0.1, 12);
    NormalSource noise(12);
    std::vector<double> x(401, 0.0);
    for (int t = 0; t < 3; ++t) x[t] = 0.1 * noise.normal();
    for (std::size_t t = 2; t < 400; ++t) {
        const auto& ct = c[static_cast<std::size_t>((*s.regime_labels)[t] - 1)];
        x[t + 1] = ct[0] * x[t] + ct[1] * x[t - 1] + ct[2] * x[t - 2] + 0.1 * noise.normal();
    }
    for (std::size_t t = 0; t < 400; ++t) REQUIRE(std::abs(value(s, t) - x[t]) <= 1e-12);
}

TEST_CASE("chain occupancy matches the stationary distribution") {
    const auto path = sample_markov_chain(1000000, two_state(0.998, 0.996), 1);
    double ones = 0.0;
    for (int r : path) ones += r == 0;
    CHECK(std::abs(ones / path.size() - 2.0 / 3.0) <= 0.02);
}

TEST_CASE("empirical transition frequencies converge to the matrix") {
    Matrix psi(3, 3);
    psi << 0.9, 0.07, 0.03, 0.2, 0.75, 0.05, 0.1, 0.1, 0.8;
    const auto path = sample_markov_chain(1000000, psi, 8);
    Matrix counts = Matrix::Zero(3, 3);
    for (std::size_t t = 1; t < path.size(); ++t) counts(path[t - 1], path[t]) += 1.0;
    for (int i = 0; i < 3; ++i) counts.row(i) /= counts.row(i).sum();
    CHECK((counts - psi).cwiseAbs().maxCoeff() <= 0.005);
}

TEST_CASE("noiseless single-regime sine is periodic and bounded") {
    const SeriesBundle s = gen_sine_markov(400, {50.0}, 0.5, Matrix::Identity(1, 1), 0.0, 2);
    for (std::size_t t = 0; t + 50 < s.size(); ++t) CHECK(std::abs(value(s, t) - value(s, t + 50)) <= 1e-12);
    const SeriesBundle two = gen_sine_markov(2000, {50.0, 200.0}, 0.5, two_state(0.99, 0.99), 0.0, 2);
    for (std::size_t t = 0; t < two.size(); ++t) CHECK(std::abs(value(two, t)) <= 0.5);
}

TEST_CASE("sine regimes sojourn for about 100 steps with the default matrix") {
    const SeriesBundle s = gen_sine_markov(1000000, {50.0, 200.0}, 0.5, two_state(0.99, 0.99), 0.05, 4);
    const auto& l = *s.regime_labels;
    std::size_t runs = 1;
    for (std::size_t t = 1; t < l.size(); ++t) runs += l[t] != l[t - 1];
    const double mean_sojourn = static_cast<double>(l.size()) / static_cast<double>(runs);
    CHECK(std::abs(mean_sojourn - 100.0) <= 5.0);
}

TEST_CASE("sine phase is continuous across a switch") {
    // Without noise, consecutive values differ by at most one phase step.
    const SeriesBundle s = gen_sine_markov(5000, {50.0, 200.0}, 0.5, two_state(0.99, 0.99), 0.0, 6);
    const double max_step = 0.5 * 2.0 * std::numbers::pi / 50.0;
    for (std::size_t t = 0; t + 1 < s.size(); ++t) CHECK(std::abs(value(s, t + 1) - value(s, t)) <= max_step + 1e-12);
}

TEST_CASE("generators are bit-reproducible per seed") {
    for (SyntheticKind kind : {SyntheticKind::ar_deterministic, SyntheticKind::ar_markov, SyntheticKind::sine_markov}) {
        SyntheticSpec spec = SyntheticSpec::defaults(kind);
        spec.length = 1500;
        spec.seed = 31;
        const SeriesBundle a = generate(spec), b = generate(spec);
        bool same = *a.regime_labels == *b.regime_labels;
        for (std::size_t t = 0; t < a.size(); ++t) same = same && a.inputs[t] == b.inputs[t] && a.targets[t] == b.targets[t];
        CHECK(same);
        spec.seed = 32;
        CHECK(generate(spec).inputs[700] != a.inputs[700]);
        check_targets_are_next_inputs(a);
    }
}

TEST_CASE("benchmark defaults per kind") {
    const SyntheticSpec ar = SyntheticSpec::defaults(SyntheticKind::ar_markov);
    CHECK(ar.length == 5000);
    CHECK(ar.noise_std == 0.1);
    CHECK(ar.transition(0, 0) == 0.998);
    CHECK(ar.transition(1, 1) == 0.996);
    const SyntheticSpec sine = SyntheticSpec::defaults(SyntheticKind::sine_markov);
    CHECK(sine.noise_std == 0.05);
    CHECK(sine.magnitude == 0.5);
    CHECK(sine.transition(0, 1) == doctest::Approx(0.01));
}

TEST_CASE("spec validation") {
    SyntheticSpec spec = SyntheticSpec::defaults(SyntheticKind::ar_markov);
    spec.transition(0, 0) = 0.5;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec = SyntheticSpec::defaults(SyntheticKind::sine_markov);
    spec.periods = {50.0, -1.0};
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    CHECK_THROWS_AS(gen_ar_deterministic(1, 0.1, 1), ConfigError);
    CHECK_THROWS_AS(synthetic_kind_from_string("garch"), ConfigError);
}
