#pragma once

// Flat key = value run configuration shared by every subcommand.
//
//   # comment
//   kind = ar_deterministic
//   hidden_dim = 16
//   sweep.beta = 0.5, 0.7, 0.9
//
// Keys are listed in RunConfig::known_keys(). Later assignments win, so
// command-line overrides are applied after the file. `sweep.<key>` lines
// declare grid axes for the sweep command; their values are a comma list.

#include "mrnn/datagen.hpp"
#include "mrnn/evalio.hpp"
#include "mrnn/experiment.hpp"
#include "mrnn/hmm_switch.hpp"
#include "mrnn/training.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mrnn {

struct RunConfig {
    // Data: a synthetic spec unless `data` names a CSV file.
    SyntheticSpec synthetic;
    std::optional<std::uint64_t> data_seed;  // defaults to `seed`
    std::string data;                        // empty -> synthetic
    CsvSchema schema;
    bool difference_all = false;

    Hyperparams hp;
    SwitchConfig switching;
    ExperimentOptions options;

    std::uint64_t seed = 1;
    std::string out = "out";
    std::string checkpoint;        // empty -> <out>/model.json
    std::string segment = "test";  // scored range of eval: test, val or all
    bool parallel = true;          // sweep runs grid points through OpenMP

    std::vector<std::pair<std::string, std::vector<std::string>>> sweep_axes;

    // Throws ConfigError on unknown keys or malformed values.
    void set(const std::string& key, const std::string& value);
    void apply_text(const std::string& text, const std::string& origin = "config");
    void apply_file(const std::string& path);

    // Cross-field checks of every section.
    void validate() const;

    SyntheticSpec effective_synthetic() const;
    Hyperparams effective_hp() const;
    std::string checkpoint_path() const;

    // Canonical key = value listing that reproduces this configuration.
    std::string to_text() const;

    static const std::vector<std::string>& known_keys();

private:
    // Explicit values survive a later `kind` line.
    bool noise_std_set_ = false;
    bool magnitude_set_ = false;
};

// "key=value" -> {key, value}; throws ConfigError without '='.
std::pair<std::string, std::string> split_assignment(const std::string& text);

}  // namespace mrnn
