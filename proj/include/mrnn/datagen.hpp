#pragma once

// Seeded generators for the three two-regime benchmark processes.
//
// Noise: std::mt19937_64 seeded with the spec seed, 53-bit uniforms
// u = (bits >> 11 + 1) * 2^-53 in (0, 1], and the Box-Muller transform
// z0 = sqrt(-2 ln u1) cos(2 pi u2), z1 = sqrt(-2 ln u1) sin(2 pi u2),
// consumed in that order. Regime chains use a second mt19937_64 seeded
// with seed + 0x9E3779B97F4A7C15 and one uniform per transition.

#include "mrnn/linalg.hpp"
#include "mrnn/series.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace mrnn {

enum class SyntheticKind { ar_deterministic, ar_markov, sine_markov };

std::string to_string(SyntheticKind kind);
SyntheticKind synthetic_kind_from_string(const std::string& name);

class NormalSource {
public:
    explicit NormalSource(std::uint64_t seed) : engine_(seed) {}
    double uniform();  // (0, 1]
    double normal();

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

struct SyntheticSpec {
    SyntheticKind kind = SyntheticKind::ar_deterministic;
    std::size_t length = 5000;
    double noise_std = 0.1;
    std::vector<std::vector<double>> ar_coeffs{{0.95, 0.5, -0.5}, {0.95, -0.5, 0.5}};
    Matrix transition;  // empty -> the kind's default
    std::size_t segment_length = 500;
    std::vector<double> periods{50.0, 200.0};
    double magnitude = 0.5;
    std::optional<int> initial_regime;  // 1-based; uniform draw when absent
    std::uint64_t seed = 1;

    // Standard benchmark defaults for each kind.
    static SyntheticSpec defaults(SyntheticKind kind);
    void validate() const;
};

// x_{t+1} = x_t + e while mod(t, 2 * segment) < segment, else -0.9 x_t + e.
SeriesBundle gen_ar_deterministic(std::size_t length, double noise_std, std::uint64_t seed,
                                  std::size_t segment_length = 500);

SeriesBundle gen_ar_markov(std::size_t length, const std::vector<std::vector<double>>& coeffs,
                           const Matrix& transition, double noise_std, std::uint64_t seed,
                           std::optional<int> initial_regime = std::nullopt);

SeriesBundle gen_sine_markov(std::size_t length, const std::vector<double>& periods, double magnitude,
                             const Matrix& transition, double noise_std, std::uint64_t seed,
                             std::optional<int> initial_regime = std::nullopt);

SeriesBundle generate(const SyntheticSpec& spec);

// 0-based regime path of a first-order Markov chain.
std::vector<int> sample_markov_chain(std::size_t length, const Matrix& transition, std::uint64_t seed,
                                     std::optional<int> initial_regime = std::nullopt);

}  // namespace mrnn
