#pragma once

#include <filesystem>
#include <vector>

#include "ofdmdet/lstm.hpp"
#include "ofdmdet/ofdm.hpp"
#include "ofdmdet/training.hpp"

namespace ofdmdet {

// A trained bank plus everything needed to reproduce and reuse it.
struct Checkpoint {
    OfdmConfig config;                    // link configuration the bank was trained for
    TrainConfig train;                    // hyperparameters used
    ModelBank bank;
    std::vector<TrainingState> history;   // one per group model (loss curves, best epoch)
};

inline constexpr int kCheckpointVersion = 1;

// JSON on disk: {version, config, train, layout, models: [per-matrix arrays,
// row-major], history}.  Doubles are serialized with round-trip precision, so
// load(save(x)) reproduces parameters bit-for-bit.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

} // namespace ofdmdet
