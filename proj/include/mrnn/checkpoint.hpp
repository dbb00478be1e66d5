#pragma once

// Model checkpoints as a self-describing JSON document:
//
//   {
//     "format": "markovian-rnn-checkpoint", "format_version": 1,
//     "shapes": {"num_regimes", "hidden_dim", "input_dim", "output_dim", "input_features"},
//     "regime_input_weights": [{"rows", "cols", "data": [row-major]}, ...],
//     "regime_recurrent_weights": [...], "output_weights": {...}, "transition": {...},
//     "hyperparams": {...}, "switch_config": {...},
//     "scaler": {"input_mean", "input_scale", "target_mean", "target_scale"}
//   }
//
// input_dim counts the bias slot, input_features does not. Doubles are
// written with round-trip precision so a load restores every bit.

#include "mrnn/evalio.hpp"
#include "mrnn/hmm_switch.hpp"
#include "mrnn/rnn_core.hpp"
#include "mrnn/training.hpp"

#include <string>

namespace mrnn {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
    ModelParams params;
    Hyperparams hp;
    SwitchConfig config;
    Scaler scaler;

    int input_features() const { return params.input_dim() - 1; }
};

std::string checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const std::string& text);

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace mrnn
