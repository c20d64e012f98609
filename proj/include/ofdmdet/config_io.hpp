#pragma once

#include <filesystem>

#include "ofdmdet/evaluate.hpp"

namespace ofdmdet {

// Loads a custom experiment description from JSON.  Every section is optional
// and falls back to the defaults; unknown keys anywhere are rejected.
// Schema (all shown with defaults):
// {
//   "name": "custom",
//   "ofdm": {"subcarriers": 64, "cyclic_prefix": 16, "pilot_count": 8,
//            "modulation": "qpsk", "symbol_duration": 0.001},
//   "channel": {"tau": 2.0, "max_delay": 15},
//   "detectors": ["ls", "mmse", "ddlsd"],
//   "snr_grid_db": [0, 2.5, ..., 20],
//   "frames_per_point": 5000,
//   "group_bits": 16,
//   "seed": 1,
//   "channel_mode": "linear",
//   "train": {"optimizer": "adam", "learning_rate": 0.01, "lr_drop_factor": 0.1,
//             "lr_drop_period": 25, "weight_decay": 0, "gradient_threshold": 1,
//             "minibatch": 1000, "max_epochs": 100, "seed": 1},
//   "train_data": {"n_frames": 10000, "snrs_db": [20], "hidden": 16,
//                  "layout": {"timesteps": 2, "features_per_step": 128}}
// }
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);

// Same parsing applied to an in-memory document (exposed for tests).
ExperimentSpec parse_experiment_spec(const std::string& content, const std::string& context);

} // namespace ofdmdet
