#include "mrnn/datagen.hpp"

#include "mrnn/errors.hpp"

#include <cmath>
#include <numbers>

namespace mrnn {

namespace {

constexpr std::uint64_t kChainSeedOffset = 0x9E3779B97F4A7C15ULL;

void check_transition(const Matrix& transition) {
    if (transition.rows() < 1 || transition.rows() != transition.cols())
        throw ConfigError("transition matrix must be square and non-empty");
    for (Eigen::Index i = 0; i < transition.rows(); ++i) {
        if (transition.row(i).minCoeff() < 0.0 || std::abs(transition.row(i).sum() - 1.0) > 1e-9)
            throw ConfigError("transition row " + std::to_string(i) + " is not a probability vector");
    }
}

Matrix two_state(double p11, double p22) {
    Matrix m(2, 2);
    m << p11, 1.0 - p11, 1.0 - p22, p22;
    return m;
}

// Packs values x_0..x_T into (x_t, y_t = x_{t+1}) rows.
SeriesBundle pack(const std::vector<double>& values, std::vector<int> labels) {
    SeriesBundle b;
    const std::size_t n = values.size() - 1;
    b.inputs.reserve(n);
    b.targets.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
        b.inputs.push_back(Vector::Constant(1, values[t]));
        b.targets.push_back(Vector::Constant(1, values[t + 1]));
    }
    labels.resize(n);
    b.regime_labels = std::move(labels);
    return b;
}

}  // namespace

std::string to_string(SyntheticKind kind) {
    switch (kind) {
        case SyntheticKind::ar_deterministic: return "ar_deterministic";
        case SyntheticKind::ar_markov: return "ar_markov";
        case SyntheticKind::sine_markov: return "sine_markov";
    }
    return "unknown";
}

SyntheticKind synthetic_kind_from_string(const std::string& name) {
    if (name == "ar_deterministic") return SyntheticKind::ar_deterministic;
    if (name == "ar_markov") return SyntheticKind::ar_markov;
    if (name == "sine_markov") return SyntheticKind::sine_markov;
    throw ConfigError("unknown synthetic kind '" + name + "'");
}

double NormalSource::uniform() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double NormalSource::normal() {
    if (spare_) {
        const double z = *spare_;
        spare_.reset();
        return z;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    return radius * std::cos(angle);
}

SyntheticSpec SyntheticSpec::defaults(SyntheticKind kind) {
    SyntheticSpec s;
    s.kind = kind;
    switch (kind) {
        case SyntheticKind::ar_deterministic:
            s.noise_std = 0.1;
            break;
        case SyntheticKind::ar_markov:
            s.noise_std = 0.1;
            s.transition = two_state(0.998, 0.996);
            break;
        case SyntheticKind::sine_markov:
            s.noise_std = 0.05;
            s.transition = two_state(0.99, 0.99);
            break;
    }
    return s;
}

void SyntheticSpec::validate() const {
    if (length < 1) throw ConfigError("synthetic length must be at least 1");
    if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) throw ConfigError("noise_std must be finite and >= 0");
    switch (kind) {
        case SyntheticKind::ar_deterministic:
            if (length < 2) throw ConfigError("ar_deterministic needs length >= 2");
            if (segment_length < 1) throw ConfigError("segment_length must be positive");
            break;
        case SyntheticKind::ar_markov:
            if (ar_coeffs.empty()) throw ConfigError("ar_markov needs coefficient lists");
            for (const auto& c : ar_coeffs) {
                if (c.size() != ar_coeffs.front().size() || c.empty())
                    throw ConfigError("AR coefficient lists must share one non-zero order");
                for (double v : c)
                    if (!std::isfinite(v)) throw ConfigError("AR coefficients must be finite");
            }
            check_transition(transition);
            if (static_cast<std::size_t>(transition.rows()) != ar_coeffs.size())
                throw ConfigError("transition size does not match the number of AR regimes");
            break;
        case SyntheticKind::sine_markov:
            if (periods.empty()) throw ConfigError("sine_markov needs periods");
            for (double p : periods)
                if (!(p > 0.0)) throw ConfigError("sine periods must be positive");
            check_transition(transition);
            if (static_cast<std::size_t>(transition.rows()) != periods.size())
                throw ConfigError("transition size does not match the number of periods");
            break;
    }
    if (initial_regime && (*initial_regime < 1 || (transition.rows() > 0 && *initial_regime > transition.rows())))
        throw ConfigError("initial_regime out of range");
}

std::vector<int> sample_markov_chain(std::size_t length, const Matrix& transition, std::uint64_t seed,
                                     std::optional<int> initial_regime) {
    check_transition(transition);
    const auto k = static_cast<int>(transition.rows());
    NormalSource rng(seed + kChainSeedOffset);
    std::vector<int> path(length);
    if (length == 0) return path;

    auto draw = [&](auto probability_of) {
        const double u = rng.uniform();
        double acc = 0.0;
        for (int j = 0; j < k; ++j) {
            acc += probability_of(j);
            if (u <= acc) return j;
        }
        // u can exceed the accumulated sum by roundoff; take the last state with mass.
        for (int j = k - 1; j > 0; --j)
            if (probability_of(j) > 0.0) return j;
        return 0;
    };

    path[0] = initial_regime ? *initial_regime - 1 : draw([k](int) { return 1.0 / k; });
    for (std::size_t t = 1; t < length; ++t) {
        const int prev = path[t - 1];
        path[t] = draw([&](int j) { return transition(prev, j); });
    }
    return path;
}

SeriesBundle gen_ar_deterministic(std::size_t length, double noise_std, std::uint64_t seed,
                                  std::size_t segment_length) {
    if (length < 2) throw ConfigError("ar_deterministic needs length >= 2");
    if (segment_length < 1) throw ConfigError("segment_length must be positive");
    NormalSource rng(seed);
    std::vector<double> x(length + 1);
    std::vector<int> labels(length + 1);
    x[0] = noise_std * rng.normal();
    for (std::size_t t = 0; t < length; ++t) {
        const bool persistent = (t % (2 * segment_length)) < segment_length;
        labels[t] = persistent ? 1 : 2;
        const double eps = noise_std * rng.normal();
        x[t + 1] = persistent ? x[t] + eps : -0.9 * x[t] + eps;
    }
    return pack(x, std::move(labels));
}

SeriesBundle gen_ar_markov(std::size_t length, const std::vector<std::vector<double>>& coeffs,
                           const Matrix& transition, double noise_std, std::uint64_t seed,
                           std::optional<int> initial_regime) {
    SyntheticSpec spec;
    spec.kind = SyntheticKind::ar_markov;
    spec.length = length;
    spec.ar_coeffs = coeffs;
    spec.transition = transition;
    spec.noise_std = noise_std;
    spec.initial_regime = initial_regime;
    spec.validate();

    const std::size_t order = coeffs.front().size();
    const auto regimes = sample_markov_chain(length + 1, transition, seed, initial_regime);
    NormalSource rng(seed);
    std::vector<double> x(length + 1, 0.0);
    // Warm-up samples are pure noise.
    for (std::size_t t = 0; t < std::min(order, length + 1); ++t) x[t] = noise_std * rng.normal();
    for (std::size_t t = order - 1; t < length; ++t) {
        const auto& c = coeffs[static_cast<std::size_t>(regimes[t])];
        double next = 0.0;
        for (std::size_t i = 0; i < order; ++i) next += c[i] * x[t - i];
        x[t + 1] = next + noise_std * rng.normal();
    }
    std::vector<int> labels(length + 1);
    for (std::size_t t = 0; t <= length; ++t) labels[t] = regimes[t] + 1;
    return pack(x, std::move(labels));
}

SeriesBundle gen_sine_markov(std::size_t length, const std::vector<double>& periods, double magnitude,
                             const Matrix& transition, double noise_std, std::uint64_t seed,
                             std::optional<int> initial_regime) {
    SyntheticSpec spec;
    spec.kind = SyntheticKind::sine_markov;
    spec.length = length;
    spec.periods = periods;
    spec.magnitude = magnitude;
    spec.transition = transition;
    spec.noise_std = noise_std;
    spec.initial_regime = initial_regime;
    spec.validate();

    const auto regimes = sample_markov_chain(length + 1, transition, seed, initial_regime);
    NormalSource rng(seed);
    std::vector<double> x(length + 1);
    std::vector<int> labels(length + 1);
    // Phase is continuous across regime switches.
    double phase = 0.0;
    for (std::size_t t = 0; t <= length; ++t) {
        x[t] = magnitude * std::sin(phase) + noise_std * rng.normal();
        labels[t] = regimes[t] + 1;
        phase += 2.0 * std::numbers::pi / periods[static_cast<std::size_t>(regimes[t])];
    }
    return pack(x, std::move(labels));
}

SeriesBundle generate(const SyntheticSpec& spec) {
    switch (spec.kind) {
        case SyntheticKind::ar_deterministic:
            return gen_ar_deterministic(spec.length, spec.noise_std, spec.seed, spec.segment_length);
        case SyntheticKind::ar_markov:
            return gen_ar_markov(spec.length, spec.ar_coeffs, spec.transition, spec.noise_std, spec.seed,
                                 spec.initial_regime);
        case SyntheticKind::sine_markov:
            return gen_sine_markov(spec.length, spec.periods, spec.magnitude, spec.transition, spec.noise_std,
                                   spec.seed, spec.initial_regime);
    }
    throw ConfigError("unknown synthetic kind");
}

}  // namespace mrnn
