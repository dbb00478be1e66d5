#pragma once

#include "mrnn/linalg.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace mrnn {

// Chronological split: train is [0, train_end), validation is
// [train_end, val_end), test is [val_end, size).
struct Split {
    std::size_t train_end = 0;
    std::size_t val_end = 0;
};

struct SeriesBundle {
    std::vector<Vector> inputs;   // raw features, no bias slot
    std::vector<Vector> targets;
    std::optional<std::vector<int>> regime_labels;  // 1-based
    std::optional<Split> split;

    std::size_t size() const { return inputs.size(); }
    int feature_dim() const { return inputs.empty() ? 0 : static_cast<int>(inputs.front().size()); }
    int output_dim() const { return targets.empty() ? 0 : static_cast<int>(targets.front().size()); }

    // Aligned lengths, consistent dimensions, ordered split. Throws ConfigError.
    void validate() const;
};

// Model-facing input: features followed by a constant 1 for the bias.
Vector with_bias(const Vector& features);

}  // namespace mrnn
