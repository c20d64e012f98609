#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ofdmdet/numerics.hpp"
#include "ofdmdet/ofdm.hpp"

namespace ofdmdet {

// Gate order inside the stacked gate-weight block.
enum class Gate : std::size_t { Forget = 0, Input = 1, Candidate = 2, Output = 3 };

struct LstmShape {
    std::size_t hidden = 16;
    std::size_t feature = 128;  // inputs per timestep
    std::size_t output = 16;    // bits predicted per example (group size p)

    std::size_t concat() const { return hidden + feature; }  // [s_{t-1}, x_t]
    std::size_t gate_weight_count() const { return 4 * hidden * concat(); }
    std::size_t param_count() const {
        return gate_weight_count() + 4 * hidden + output * hidden + output;
    }
    bool operator==(const LstmShape&) const = default;
};

// All parameters live in one flat buffer so the optimizer, gradient clipping,
// and Adam moments can treat the model as a single vector.  Layout:
//   [ W_f | W_i | W_c | W_o ]  4*hidden x concat, row-major, gates stacked
//   [ b_f | b_i | b_c | b_o ]  4*hidden
//   [ W_out ]                  output x hidden, row-major
//   [ b_out ]                  output
// Stacking the gate matrices lets one matrix-vector product per timestep feed
// all four gates.
struct LstmParams {
    LstmShape shape;
    std::vector<double> data;

    static LstmParams zeros(const LstmShape& shape);

    std::span<double> w_all() { return {data.data(), shape.gate_weight_count()}; }
    std::span<const double> w_all() const { return {data.data(), shape.gate_weight_count()}; }
    std::span<double> b_all() { return {data.data() + shape.gate_weight_count(), 4 * shape.hidden}; }
    std::span<const double> b_all() const {
        return {data.data() + shape.gate_weight_count(), 4 * shape.hidden};
    }
    std::span<double> w_gate(Gate g) {
        return w_all().subspan(static_cast<std::size_t>(g) * shape.hidden * shape.concat(),
                               shape.hidden * shape.concat());
    }
    std::span<const double> w_gate(Gate g) const {
        return w_all().subspan(static_cast<std::size_t>(g) * shape.hidden * shape.concat(),
                               shape.hidden * shape.concat());
    }
    std::span<double> b_gate(Gate g) {
        return b_all().subspan(static_cast<std::size_t>(g) * shape.hidden, shape.hidden);
    }
    std::span<const double> b_gate(Gate g) const {
        return b_all().subspan(static_cast<std::size_t>(g) * shape.hidden, shape.hidden);
    }
    std::span<double> w_out() {
        return {data.data() + shape.gate_weight_count() + 4 * shape.hidden,
                shape.output * shape.hidden};
    }
    std::span<const double> w_out() const {
        return {data.data() + shape.gate_weight_count() + 4 * shape.hidden,
                shape.output * shape.hidden};
    }
    std::span<double> b_out() {
        return {data.data() + shape.param_count() - shape.output, shape.output};
    }
    std::span<const double> b_out() const {
        return {data.data() + shape.param_count() - shape.output, shape.output};
    }
};

// How the flat feature vector is fed to the recurrence.
struct SequenceLayout {
    std::size_t timesteps = 2;
    std::size_t features_per_step = 128;
    bool operator==(const SequenceLayout&) const = default;
};

struct TrainingExample {
    std::vector<double> features;       // Re/Im interleaved pilot block then data block
    std::vector<std::uint8_t> labels;   // one bit group, length = shape.output
    std::size_t group_index = 0;
};

// Interleave two frequency-domain blocks into the feature vector
// [Re p_0, Im p_0, ..., Re p_{N-1}, Im p_{N-1}, Re d_0, Im d_0, ...].
std::vector<double> frame_features(const cvec& y_pilot_freq, const cvec& y_data_freq);

struct StepCache {
    std::vector<double> z;              // concat input [s_prev, x_t]
    std::vector<double> f, i, g, o;     // gate activations (g = candidate tanh)
    std::vector<double> c;              // cell state after the update
    std::vector<double> tanh_c;
};

struct ForwardCache {
    LstmShape shape;
    SequenceLayout layout;
    std::vector<StepCache> steps;
    std::vector<double> s_final;        // hidden state after the last step
    std::vector<double> d_raw;          // sigmoid outputs before clamping
    std::vector<double> d_hat;          // clamped probabilities
    std::uint64_t params_stamp = 0;     // sanity guard for backward()
};

// Probability clamp applied before any logarithm.
inline constexpr double kProbClamp = 1e-12;

// One recurrence step: f = sigma(W_f z + b_f), i = sigma(W_i z + b_i),
// g = tanh(W_c z + b_c), c = f*c_prev + i*g, o = sigma(W_o z + b_o),
// s = o * tanh(c).  Returns (s_t, c_t) and fills `step` for backpropagation.
void lstm_cell_forward(std::span<const double> x_t, std::span<const double> s_prev,
                       std::span<const double> c_prev, const LstmParams& params,
                       std::span<double> s_out, std::span<double> c_out, StepCache& step);

// Full forward pass: zero initial state, layout.timesteps cell steps, then
// d_hat = sigma(W_out s_T + b_out) clamped to [kProbClamp, 1 - kProbClamp].
ForwardCache forward(std::span<const double> features, const LstmParams& params,
                     const SequenceLayout& layout);

struct LossValue {
    double psi = 0.0;    // cross-entropy
    double gamma = 0.0;  // psi + (weight_decay / 2) * sum of squared weights
};

// psi = -sum_i [ y_i log d_i + (1 - y_i) log(1 - d_i) ] on clamped probabilities;
// gamma adds the L2 penalty over weight matrices (biases excluded).
LossValue loss(std::span<const double> d_hat, std::span<const std::uint8_t> labels,
               const LstmParams& params, double weight_decay);

// Exact gradient of gamma with respect to every parameter, via backpropagation
// through time.  Output is shaped like params.data.  Clamped outputs contribute
// zero gradient (the loss is locally flat there).
std::vector<double> backward(const ForwardCache& cache, std::span<const std::uint8_t> labels,
                             const LstmParams& params, double weight_decay);

// Accumulates only the data-term gradient (no weight decay) into grad_out,
// for minibatch averaging; grad_out must be pre-sized and zeroed by the caller.
void backward_accumulate(const ForwardCache& cache, std::span<const std::uint8_t> labels,
                         const LstmParams& params, std::span<double> grad_out);

// If the global L2 norm exceeds threshold, rescale so the norm equals threshold.
void clip_gradients(std::span<double> grads, double threshold);

// A bank of group models covering the whole data block in group-index order.
struct ModelBank {
    SequenceLayout layout;
    std::vector<LstmParams> models;

    std::size_t group_bits() const { return models.empty() ? 0 : models.front().shape.output; }
    void validate(std::size_t total_bits) const;
};

// Online detection: demodulate both blocks of a serialized received frame,
// build the feature vector, run every group model, threshold each output at
// 0.5 (exact ties decide 0), and concatenate groups in index order.
std::vector<std::uint8_t> predict_bits(const cvec& frame_rx_time, const ModelBank& bank,
                                       const OfdmConfig& config);

// Group bookkeeping: number of models needed for total_bits at group size p.
std::size_t group_count(std::size_t total_bits, std::size_t group_bits);

} // namespace ofdmdet
