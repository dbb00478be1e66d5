#include "mrnn/series.hpp"

#include "mrnn/errors.hpp"

namespace mrnn {

void SeriesBundle::validate() const {
    if (inputs.empty()) throw ConfigError("series is empty");
    if (targets.size() != inputs.size()) throw ConfigError("inputs and targets differ in length");
    if (regime_labels && regime_labels->size() != inputs.size())
        throw ConfigError("regime labels differ in length from inputs");
    const auto nx = inputs.front().size();
    const auto ny = targets.front().size();
    if (nx < 1 || ny < 1) throw ConfigError("series has an empty feature or target dimension");
    for (std::size_t t = 0; t < inputs.size(); ++t) {
        if (inputs[t].size() != nx || targets[t].size() != ny)
            throw ConfigError("inconsistent dimension at row " + std::to_string(t));
    }
    if (split && !(split->train_end <= split->val_end && split->val_end <= inputs.size()))
        throw ConfigError("split boundaries are out of order");
}

Vector with_bias(const Vector& features) {
    Vector x(features.size() + 1);
    x.head(features.size()) = features;
    x[features.size()] = 1.0;
    return x;
}

}  // namespace mrnn
