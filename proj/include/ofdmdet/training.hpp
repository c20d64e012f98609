#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "ofdmdet/constellation.hpp"
#include "ofdmdet/lstm.hpp"
#include "ofdmdet/rng.hpp"

namespace ofdmdet {

enum class Optimizer { GradientDescent, Adam };

const char* optimizer_name(Optimizer o);
Optimizer optimizer_from_name(std::string_view name);

struct TrainConfig {
    Optimizer optimizer = Optimizer::Adam;
    double learning_rate = 0.01;
    double lr_drop_factor = 0.1;      // multiplies the rate every lr_drop_period epochs
    std::size_t lr_drop_period = 25;  // epochs
    double weight_decay = 0.0;        // L2 coefficient on weight matrices
    double gradient_threshold = 1.0;  // global-norm clip
    std::size_t minibatch = 1000;
    std::size_t max_epochs = 100;
    std::uint64_t seed = 1;

    void validate() const;
};

struct TrainingState {
    std::uint64_t step = 0;           // optimizer updates applied so far
    std::size_t epoch = 1;            // 1-based
    std::vector<double> m, v;         // Adam moments, shaped like the flat parameters
    double learning_rate = 0.0;       // current scheduled rate
    std::vector<double> train_gamma;  // per-epoch mean cost over the training set
    std::vector<double> val_psi;      // per-epoch mean validation cross-entropy
    std::size_t best_epoch = 0;       // 1-based; 0 until the first epoch completes
};

// alpha * drop_factor^floor(epoch / drop_period), epoch 1-based.
double scheduled_rate(const TrainConfig& cfg, std::size_t epoch);

// Uniform [-1/sqrt(fan_in), +1/sqrt(fan_in)] weights from the stream;
// forget-gate bias 1.0, all other biases 0.
LstmParams init_params(const LstmShape& shape, RngStream& rng);

// One parameter update.  GradientDescent: theta -= rate * g.  Adam: standard
// bias-corrected moments (beta1 0.9, beta2 0.999, eps 1e-8) at the scheduled
// rate.  Increments state.step; throws on non-finite gradients.
void optimizer_step(LstmParams& params, std::span<const double> grads, TrainingState& state,
                    const TrainConfig& cfg);

struct TrainResult {
    LstmParams params;    // snapshot from the best validation epoch
    TrainingState state;  // full history
};

// Minibatch training of a single group model.  Deterministic given cfg.seed
// and stream_salt (callers training a bank pass the group index as the salt).
TrainResult train(const std::vector<TrainingExample>& train_set,
                  const std::vector<TrainingExample>& val_set, const TrainConfig& cfg,
                  const LstmShape& shape, const SequenceLayout& layout,
                  std::uint64_t stream_salt = 0);

// Trains one model per bit group (examples routed by group_index) and collects
// them into a bank.  Histories, one per group, are appended when requested.
ModelBank train_bank(const std::vector<TrainingExample>& train_set,
                     const std::vector<TrainingExample>& val_set, const TrainConfig& cfg,
                     const LstmShape& shape, const SequenceLayout& layout, std::size_t groups,
                     std::vector<TrainingState>* histories = nullptr);

// Weight sharing across groups: every group solves the same detection problem
// up to a circular carrier shift (the multipath taps are independent and
// circularly symmetric, so a shift of the spectrum is just a per-tap phase
// rotation of an equally likely channel).  This trainer aligns every example
// to group 0 — rotating the per-block features, fixing the known block's sign
// pattern, and XOR-correcting the labels of negated carriers — trains a single
// model on the pooled examples (groups x the data of any one group at the same
// total cost), and then instantiates the bank by folding each group's
// alignment back into its copy of the weights as a signed column permutation
// plus per-output sign flips.  The result is a standard per-group bank.
//
// Exactness requires the known block to be antipodal (all cross products
// P(u)·conj(P(v)) real, see pilot_sequence) and one full block per timestep;
// throws otherwise.  Appends a single pooled history when requested.
ModelBank train_bank_shared(std::vector<TrainingExample> train_set,
                            std::vector<TrainingExample> val_set, const TrainConfig& cfg,
                            const LstmShape& shape, const SequenceLayout& layout,
                            std::size_t groups, const cvec& known_block, Modulation modulation,
                            std::vector<TrainingState>* histories = nullptr);

} // namespace ofdmdet
