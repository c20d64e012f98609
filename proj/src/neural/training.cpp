#include "ofdmdet/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ofdmdet/kernels.hpp"

namespace ofdmdet {

const char* optimizer_name(Optimizer o) {
    switch (o) {
        case Optimizer::GradientDescent: return "gd";
        case Optimizer::Adam: return "adam";
    }
    return "?";
}

Optimizer optimizer_from_name(std::string_view name) {
    if (name == "gd" || name == "sgd" || name == "gradient_descent") return Optimizer::GradientDescent;
    if (name == "adam") return Optimizer::Adam;
    throw std::invalid_argument("unknown optimizer: " + std::string(name));
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("train config: learning_rate must be positive");
    if (!(lr_drop_factor > 0.0 && lr_drop_factor <= 1.0))
        throw std::invalid_argument("train config: lr_drop_factor must be in (0, 1]");
    if (lr_drop_period == 0) throw std::invalid_argument("train config: lr_drop_period must be positive");
    if (weight_decay < 0.0) throw std::invalid_argument("train config: weight_decay must be nonnegative");
    if (!(gradient_threshold > 0.0))
        throw std::invalid_argument("train config: gradient_threshold must be positive");
    if (minibatch == 0) throw std::invalid_argument("train config: minibatch must be positive");
    if (max_epochs == 0) throw std::invalid_argument("train config: max_epochs must be positive");
}

double scheduled_rate(const TrainConfig& cfg, std::size_t epoch) {
    const auto drops = static_cast<double>(epoch / cfg.lr_drop_period);
    return cfg.learning_rate * std::pow(cfg.lr_drop_factor, drops);
}

LstmParams init_params(const LstmShape& shape, RngStream& rng) {
    LstmParams p = LstmParams::zeros(shape);
    const double gate_bound = 1.0 / std::sqrt(static_cast<double>(shape.concat()));
    for (double& w : p.w_all()) w = (2.0 * rng.next_unit() - 1.0) * gate_bound;
    for (double& b : p.b_gate(Gate::Forget)) b = 1.0;
    const double out_bound = 1.0 / std::sqrt(static_cast<double>(shape.hidden));
    for (double& w : p.w_out()) w = (2.0 * rng.next_unit() - 1.0) * out_bound;
    return p;
}

void optimizer_step(LstmParams& params, std::span<const double> grads, TrainingState& state,
                    const TrainConfig& cfg) {
    if (grads.size() != params.data.size())
        throw std::invalid_argument("optimizer_step: gradient size mismatch");
    for (double g : grads) {
        if (!std::isfinite(g)) {
            std::ostringstream msg;
            msg << "optimizer_step: non-finite gradient at epoch " << state.epoch << ", step "
                << state.step + 1;
            throw std::runtime_error(msg.str());
        }
    }
    const double rate = scheduled_rate(cfg, state.epoch);
    state.learning_rate = rate;
    state.step += 1;

    if (cfg.optimizer == Optimizer::GradientDescent) {
        kernels::axpy(-rate, grads.data(), params.data.data(), grads.size());
        return;
    }

    if (state.m.empty()) {
        state.m.assign(grads.size(), 0.0);
        state.v.assign(grads.size(), 0.0);
    }
    if (state.m.size() != grads.size() || state.v.size() != grads.size())
        throw std::invalid_argument("optimizer_step: moment buffers do not match the parameters");

    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    const auto s = static_cast<double>(state.step);
    const double bc1 = 1.0 - std::pow(beta1, s);
    const double bc2 = 1.0 - std::pow(beta2, s);
    for (std::size_t j = 0; j < grads.size(); ++j) {
        state.m[j] = beta1 * state.m[j] + (1.0 - beta1) * grads[j];
        state.v[j] = beta2 * state.v[j] + (1.0 - beta2) * grads[j] * grads[j];
        const double m_hat = state.m[j] / bc1;
        const double v_hat = state.v[j] / bc2;
        params.data[j] -= rate * m_hat / (std::sqrt(v_hat) + eps);
    }
}

namespace {

void check_examples(const std::vector<TrainingExample>& set, const LstmShape& shape,
                    const SequenceLayout& layout, const char* which) {
    for (const auto& ex : set) {
        if (ex.labels.size() != shape.output)
            throw std::invalid_argument(std::string("train: ") + which + " label width mismatch");
        if (ex.features.size() != layout.timesteps * layout.features_per_step)
            throw std::invalid_argument(std::string("train: ") + which + " feature length mismatch");
    }
}

double mean_validation_psi(const std::vector<TrainingExample>& val_set, const LstmParams& params,
                           const SequenceLayout& layout) {
    double total = 0.0;
    for (const auto& ex : val_set) {
        const ForwardCache cache = forward(ex.features, params, layout);
        total += loss(cache.d_hat, ex.labels, params, 0.0).psi;
    }
    return total / static_cast<double>(val_set.size());
}

} // namespace

TrainResult train(const std::vector<TrainingExample>& train_set,
                  const std::vector<TrainingExample>& val_set, const TrainConfig& cfg,
                  const LstmShape& shape, const SequenceLayout& layout,
                  std::uint64_t stream_salt) {
    cfg.validate();
    if (train_set.empty() || val_set.empty())
        throw std::invalid_argument("train: empty training or validation set");
    if (layout.features_per_step != shape.feature)
        throw std::invalid_argument("train: layout feature width does not match the model shape");
    check_examples(train_set, shape, layout, "training");
    check_examples(val_set, shape, layout, "validation");

    RngStream init_rng(cfg.seed, make_stream_id(stream_tag::weight_init, 0, stream_salt));
    RngStream shuffle_rng(cfg.seed, make_stream_id(stream_tag::shuffle, 0, stream_salt));

    LstmParams params = init_params(shape, init_rng);
    TrainingState state;
    LstmParams best_params = params;
    double best_psi = std::numeric_limits<double>::infinity();

    const std::size_t n = train_set.size();
    const std::size_t param_count = shape.param_count();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> grad(param_count);

    const std::size_t w_out_off = shape.gate_weight_count() + 4 * shape.hidden;
    const std::size_t w_out_len = shape.output * shape.hidden;

    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        state.epoch = epoch;
        for (std::size_t i = n; i-- > 1;)
            std::swap(order[i], order[shuffle_rng.next_below(i + 1)]);

        double epoch_psi_sum = 0.0;
        for (std::size_t start = 0; start < n; start += cfg.minibatch) {
            const std::size_t stop = std::min(start + cfg.minibatch, n);
            const auto batch_size = static_cast<double>(stop - start);
            std::fill(grad.begin(), grad.end(), 0.0);
            double batch_psi_sum = 0.0;
            for (std::size_t i = start; i < stop; ++i) {
                const TrainingExample& ex = train_set[order[i]];
                const ForwardCache cache = forward(ex.features, params, layout);
                batch_psi_sum += loss(cache.d_hat, ex.labels, params, 0.0).psi;
                backward_accumulate(cache, ex.labels, params, grad);
            }
            if (!std::isfinite(batch_psi_sum)) {
                std::ostringstream msg;
                msg << "train: non-finite loss at epoch " << epoch << ", step " << state.step + 1;
                throw std::runtime_error(msg.str());
            }
            kernels::scal(1.0 / batch_size, grad.data(), grad.size());
            if (cfg.weight_decay != 0.0) {
                kernels::axpy(cfg.weight_decay, params.w_all().data(), grad.data(),
                              params.w_all().size());
                kernels::axpy(cfg.weight_decay, params.w_out().data(), grad.data() + w_out_off,
                              w_out_len);
            }
            clip_gradients(grad, cfg.gradient_threshold);
            optimizer_step(params, grad, state, cfg);
            epoch_psi_sum += batch_psi_sum;
        }

        double epoch_gamma = epoch_psi_sum / static_cast<double>(n);
        if (cfg.weight_decay != 0.0) {
            const double w2 = kernels::sum_sq(params.w_all().data(), params.w_all().size()) +
                              kernels::sum_sq(params.w_out().data(), w_out_len);
            epoch_gamma += 0.5 * cfg.weight_decay * w2;
        }
        state.train_gamma.push_back(epoch_gamma);

        const double val_psi = mean_validation_psi(val_set, params, layout);
        state.val_psi.push_back(val_psi);
        if (val_psi < best_psi) {
            best_psi = val_psi;
            best_params = params;
            state.best_epoch = epoch;
        }
    }

    return TrainResult{std::move(best_params), std::move(state)};
}

namespace {

// Signs of P(u)·conj(P((u+shift) mod C)) for an antipodal block; throws if any
// cross product is not ±1, since only then is the alignment a signed
// permutation that can be folded into gate weight columns.
std::vector<double> alignment_signs(const cvec& block, std::size_t shift) {
    const std::size_t c = block.size();
    std::vector<double> signs(c);
    for (std::size_t u = 0; u < c; ++u) {
        const std::complex<double> prod = block[u] * std::conj(block[(u + shift) % c]);
        if (std::abs(prod.imag()) > 1e-9 || std::abs(std::abs(prod.real()) - 1.0) > 1e-9)
            throw std::invalid_argument(
                "train_bank_shared: known block is not antipodal; carrier alignment cannot fold");
        signs[u] = prod.real() > 0.0 ? 1.0 : -1.0;
    }
    return signs;
}

// XOR mask turning a symbol's Gray label into the label of its negation.
// Verified exhaustively; throws if negation is not a fixed mask.
std::vector<std::uint8_t> negation_mask(Modulation m) {
    const auto bps = static_cast<std::size_t>(bits_per_symbol(m));
    std::vector<std::uint8_t> bits(bps, 0);
    const std::vector<std::uint8_t> mask = demap_symbols({-map_bits(bits, m).front()}, m);
    for (std::size_t v = 0; v < (std::size_t{1} << bps); ++v) {
        for (std::size_t b = 0; b < bps; ++b) bits[b] = (v >> (bps - 1 - b)) & 1u;
        const std::vector<std::uint8_t> neg = demap_symbols({-map_bits(bits, m).front()}, m);
        for (std::size_t b = 0; b < bps; ++b)
            if (neg[b] != (bits[b] ^ mask[b]))
                throw std::logic_error("train_bank_shared: symbol negation is not a fixed mask");
    }
    return mask;
}

// Rewrites each example in place as its group-0-aligned equivalent: per block,
// carrier u takes the signed value of carrier (u + shift) mod C, and the labels
// of negated carriers are mask-corrected so the bit mapping stays Gray-exact.
void align_examples(std::vector<TrainingExample>& set,
                    const std::vector<std::vector<double>>& signs_by_group,
                    const SequenceLayout& layout, std::size_t stride,
                    const std::vector<std::uint8_t>& mask) {
    const std::size_t c = layout.features_per_step / 2;
    const std::size_t bps = mask.size();
    std::vector<double> scratch(layout.features_per_step);
    for (auto& ex : set) {
        if (ex.group_index >= signs_by_group.size())
            throw std::invalid_argument("train_bank_shared: group index out of range");
        const std::vector<double>& signs = signs_by_group[ex.group_index];
        const std::size_t shift = ex.group_index * stride;
        for (std::size_t s = 0; s < layout.timesteps; ++s) {
            double* step = ex.features.data() + s * layout.features_per_step;
            for (std::size_t u = 0; u < c; ++u) {
                const std::size_t v = (u + shift) % c;
                scratch[2 * u] = signs[u] * step[2 * v];
                scratch[2 * u + 1] = signs[u] * step[2 * v + 1];
            }
            std::copy(scratch.begin(), scratch.end(), step);
        }
        for (std::size_t slot = 0; slot < stride; ++slot)
            if (signs[slot] < 0.0)
                for (std::size_t b = 0; b < bps; ++b) ex.labels[slot * bps + b] ^= mask[b];
        ex.group_index = 0;
    }
}

// model_g(x) = shared(T_g(x)) where T_g applies the signed carrier shift per
// block: fold T_g into the x-columns of the gate weights, and undo the label
// mask on negated carriers by flipping the affected output rows
// (1 - sigmoid(z) = sigmoid(-z)).
LstmParams fold_alignment(const LstmParams& shared, const std::vector<double>& signs,
                          std::size_t shift, std::size_t stride,
                          const std::vector<std::uint8_t>& mask) {
    const LstmShape& sh = shared.shape;
    const std::size_t h = sh.hidden;
    const std::size_t c = sh.feature / 2;
    const std::size_t cn = sh.concat();
    LstmParams out = shared;

    const auto w_src = shared.w_all();
    auto w_dst = out.w_all();
    for (std::size_t u = 0; u < c; ++u) {
        const std::size_t src_u = (u + c - shift % c) % c;
        const double sgn = signs[src_u];
        for (std::size_t row = 0; row < 4 * h; ++row) {
            w_dst[row * cn + h + 2 * u] = sgn * w_src[row * cn + h + 2 * src_u];
            w_dst[row * cn + h + 2 * u + 1] = sgn * w_src[row * cn + h + 2 * src_u + 1];
        }
    }

    const auto wo_src = shared.w_out();
    auto wo_dst = out.w_out();
    auto bo = out.b_out();
    const std::size_t bps = mask.size();
    for (std::size_t j = 0; j < sh.output; ++j) {
        if (signs[j / bps] < 0.0 && mask[j % bps] != 0) {
            for (std::size_t k = 0; k < h; ++k) wo_dst[j * h + k] = -wo_src[j * h + k];
            bo[j] = -bo[j];
        }
    }
    return out;
}

} // namespace

ModelBank train_bank_shared(std::vector<TrainingExample> train_set,
                            std::vector<TrainingExample> val_set, const TrainConfig& cfg,
                            const LstmShape& shape, const SequenceLayout& layout,
                            std::size_t groups, const cvec& known_block, Modulation modulation,
                            std::vector<TrainingState>* histories) {
    if (groups == 0) throw std::invalid_argument("train_bank_shared: no groups");
    const std::size_t carriers = known_block.size();
    if (carriers == 0 || carriers % groups != 0)
        throw std::invalid_argument("train_bank_shared: group count must divide the carrier count");
    if (layout.features_per_step != 2 * carriers)
        throw std::invalid_argument(
            "train_bank_shared: sharing requires one full block of carriers per timestep");
    const std::size_t stride = carriers / groups;
    const auto bps = static_cast<std::size_t>(bits_per_symbol(modulation));
    if (shape.output != stride * bps)
        throw std::invalid_argument("train_bank_shared: group width does not match the modulation");
    const std::vector<std::uint8_t> mask = negation_mask(modulation);

    std::vector<std::vector<double>> signs_by_group(groups);
    for (std::size_t g = 0; g < groups; ++g)
        signs_by_group[g] = alignment_signs(known_block, g * stride);

    align_examples(train_set, signs_by_group, layout, stride, mask);
    align_examples(val_set, signs_by_group, layout, stride, mask);

    const TrainResult shared = train(train_set, val_set, cfg, shape, layout, 0);
    if (histories != nullptr) histories->push_back(shared.state);

    ModelBank bank;
    bank.layout = layout;
    bank.models.reserve(groups);
    for (std::size_t g = 0; g < groups; ++g)
        bank.models.push_back(
            fold_alignment(shared.params, signs_by_group[g], g * stride, stride, mask));
    return bank;
}

ModelBank train_bank(const std::vector<TrainingExample>& train_set,
                     const std::vector<TrainingExample>& val_set, const TrainConfig& cfg,
                     const LstmShape& shape, const SequenceLayout& layout, std::size_t groups,
                     std::vector<TrainingState>* histories) {
    if (groups == 0) throw std::invalid_argument("train_bank: no groups");
    std::vector<std::vector<TrainingExample>> train_by_group(groups), val_by_group(groups);
    for (const auto& ex : train_set) {
        if (ex.group_index >= groups) throw std::invalid_argument("train_bank: group index out of range");
        train_by_group[ex.group_index].push_back(ex);
    }
    for (const auto& ex : val_set) {
        if (ex.group_index >= groups) throw std::invalid_argument("train_bank: group index out of range");
        val_by_group[ex.group_index].push_back(ex);
    }

    ModelBank bank;
    bank.layout = layout;
    bank.models.reserve(groups);
    for (std::size_t g = 0; g < groups; ++g) {
        TrainResult result = train(train_by_group[g], val_by_group[g], cfg, shape, layout, g);
        bank.models.push_back(std::move(result.params));
        if (histories != nullptr) histories->push_back(std::move(result.state));
    }
    return bank;
}

} // namespace ofdmdet
