// Command-line front end: mrnn <simulate|train|eval|sweep> [options].
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

#include "mrnn/commands.hpp"
#include "mrnn/errors.hpp"
#include "mrnn/run_config.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct Flags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string data;
    std::string timestamp_column;
    std::string value_column;
    std::string checkpoint;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config_path, "key = value configuration file");
    cmd->add_option("--seed", f.seed, "seed for data generation and initialization");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--set", f.overrides, "override any config key, e.g. --set beta=0.9")->take_all();
}

void add_data(CLI::App* cmd, Flags& f) {
    cmd->add_option("--data", f.data, "series CSV (t, x, y[, regime]) or raw timestamp/value CSV");
    cmd->add_option("--timestamp-column", f.timestamp_column, "timestamp column of raw CSV input");
    cmd->add_option("--value-column", f.value_column, "value column of raw CSV input");
}

// File first, then --set, then the dedicated flags.
mrnn::RunConfig build_config(const Flags& f) {
    mrnn::RunConfig config;
    if (!f.config_path.empty()) config.apply_file(f.config_path);
    for (const auto& o : f.overrides) {
        const auto [key, value] = mrnn::split_assignment(o);
        config.set(key, value);
    }
    if (f.seed) config.seed = *f.seed;
    if (!f.out.empty()) config.out = f.out;
    if (!f.data.empty()) config.data = f.data;
    if (!f.timestamp_column.empty()) config.schema.timestamp_column = f.timestamp_column;
    if (!f.value_column.empty()) config.schema.value_column = f.value_column;
    if (!f.checkpoint.empty()) config.checkpoint = f.checkpoint;
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regime-switching recurrent forecaster with HMM-filtered soft switching"};
    app.require_subcommand(1);
    Flags flags;

    auto* simulate = app.add_subcommand("simulate", "generate a labeled synthetic series");
    add_common(simulate, flags);

    auto* train = app.add_subcommand("train", "train a model and write a checkpoint");
    add_common(train, flags);
    add_data(train, flags);
    train->add_option("--checkpoint", flags.checkpoint, "checkpoint path (default <out>/model.json)");

    auto* eval = app.add_subcommand("eval", "score a checkpoint and export belief trajectories");
    add_common(eval, flags);
    add_data(eval, flags);
    eval->add_option("--checkpoint", flags.checkpoint, "checkpoint path (default <out>/model.json)");

    auto* sweep = app.add_subcommand("sweep", "run the grid declared by sweep.<key> entries");
    add_common(sweep, flags);
    add_data(sweep, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const mrnn::RunConfig config = build_config(flags);
        if (*simulate) mrnn::cmd_simulate(config);
        else if (*train) mrnn::cmd_train(config);
        else if (*eval) mrnn::cmd_eval(config);
        else if (*sweep) mrnn::cmd_sweep(config);
        return 0;
    } catch (const mrnn::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
