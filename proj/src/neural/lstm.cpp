#include "ofdmdet/lstm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "ofdmdet/kernels.hpp"

namespace ofdmdet {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::uint64_t mix64(std::uint64_t h, std::uint64_t v) {
    h ^= v;
    h *= 0x100000001b3ULL;
    return h;
}

// Cheap identity stamp for catching a backward() fed with the wrong model:
// folds the shape and a few sentinel entries of the flat buffer.  A sanity
// guard, not a content hash.
std::uint64_t params_stamp(const LstmParams& p) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    h = mix64(h, p.shape.hidden);
    h = mix64(h, p.shape.feature);
    h = mix64(h, p.shape.output);
    h = mix64(h, p.data.size());
    if (!p.data.empty()) {
        h = mix64(h, std::bit_cast<std::uint64_t>(p.data.front()));
        h = mix64(h, std::bit_cast<std::uint64_t>(p.data[p.data.size() / 2]));
        h = mix64(h, std::bit_cast<std::uint64_t>(p.data.back()));
    }
    return h;
}

} // namespace

LstmParams LstmParams::zeros(const LstmShape& shape) {
    LstmParams p;
    p.shape = shape;
    p.data.assign(shape.param_count(), 0.0);
    return p;
}

std::vector<double> frame_features(const cvec& y_pilot_freq, const cvec& y_data_freq) {
    std::vector<double> out;
    out.reserve(2 * (y_pilot_freq.size() + y_data_freq.size()));
    for (const auto& v : y_pilot_freq) {
        out.push_back(v.real());
        out.push_back(v.imag());
    }
    for (const auto& v : y_data_freq) {
        out.push_back(v.real());
        out.push_back(v.imag());
    }
    return out;
}

void lstm_cell_forward(std::span<const double> x_t, std::span<const double> s_prev,
                       std::span<const double> c_prev, const LstmParams& params,
                       std::span<double> s_out, std::span<double> c_out, StepCache& step) {
    const std::size_t h = params.shape.hidden;
    const std::size_t cn = params.shape.concat();
    if (x_t.size() != params.shape.feature || s_prev.size() != h || c_prev.size() != h ||
        s_out.size() != h || c_out.size() != h)
        throw std::invalid_argument("lstm_cell_forward: shape mismatch");
    if (params.data.size() != params.shape.param_count())
        throw std::invalid_argument("lstm_cell_forward: parameter buffer size mismatch");

    step.z.resize(cn);
    std::copy(s_prev.begin(), s_prev.end(), step.z.begin());
    std::copy(x_t.begin(), x_t.end(), step.z.begin() + static_cast<std::ptrdiff_t>(h));

    // One stacked matvec feeds all four gates.
    std::vector<double> a(4 * h);
    kernels::gemv(params.w_all().data(), 4 * h, cn, step.z.data(), params.b_all().data(), a.data());

    step.f.resize(h);
    step.i.resize(h);
    step.g.resize(h);
    step.o.resize(h);
    step.c.resize(h);
    step.tanh_c.resize(h);
    for (std::size_t j = 0; j < h; ++j) {
        step.f[j] = sigmoid(a[j]);
        step.i[j] = sigmoid(a[h + j]);
        step.g[j] = std::tanh(a[2 * h + j]);
        step.o[j] = sigmoid(a[3 * h + j]);
        step.c[j] = step.f[j] * c_prev[j] + step.i[j] * step.g[j];
        step.tanh_c[j] = std::tanh(step.c[j]);
        c_out[j] = step.c[j];
        s_out[j] = step.o[j] * step.tanh_c[j];
    }
}

ForwardCache forward(std::span<const double> features, const LstmParams& params,
                     const SequenceLayout& layout) {
    const std::size_t h = params.shape.hidden;
    if (layout.features_per_step != params.shape.feature)
        throw std::invalid_argument("forward: layout feature width does not match the model");
    if (layout.timesteps == 0 ||
        features.size() != layout.timesteps * layout.features_per_step)
        throw std::invalid_argument("forward: feature vector does not match the layout");

    ForwardCache cache;
    cache.shape = params.shape;
    cache.layout = layout;
    cache.steps.resize(layout.timesteps);
    cache.params_stamp = params_stamp(params);

    std::vector<double> s(h, 0.0), c(h, 0.0);
    std::vector<double> s_next(h), c_next(h);
    for (std::size_t t = 0; t < layout.timesteps; ++t) {
        const auto x_t = features.subspan(t * layout.features_per_step, layout.features_per_step);
        lstm_cell_forward(x_t, s, c, params, s_next, c_next, cache.steps[t]);
        s.swap(s_next);
        c.swap(c_next);
    }
    cache.s_final = s;

    const std::size_t p = params.shape.output;
    std::vector<double> logits(p);
    kernels::gemv(params.w_out().data(), p, h, s.data(), params.b_out().data(), logits.data());
    cache.d_raw.resize(p);
    cache.d_hat.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        cache.d_raw[j] = sigmoid(logits[j]);
        cache.d_hat[j] = std::clamp(cache.d_raw[j], kProbClamp, 1.0 - kProbClamp);
    }
    return cache;
}

LossValue loss(std::span<const double> d_hat, std::span<const std::uint8_t> labels,
               const LstmParams& params, double weight_decay) {
    if (d_hat.size() != labels.size())
        throw std::invalid_argument("loss: output/label length mismatch");
    double psi = 0.0;
    for (std::size_t j = 0; j < d_hat.size(); ++j) {
        const double d = std::clamp(d_hat[j], kProbClamp, 1.0 - kProbClamp);
        psi -= labels[j] ? std::log(d) : std::log(1.0 - d);
    }
    LossValue out;
    out.psi = psi;
    out.gamma = psi;
    if (weight_decay != 0.0) {
        const double w2 = kernels::sum_sq(params.w_all().data(), params.w_all().size()) +
                          kernels::sum_sq(params.w_out().data(), params.w_out().size());
        out.gamma += 0.5 * weight_decay * w2;
    }
    return out;
}

void backward_accumulate(const ForwardCache& cache, std::span<const std::uint8_t> labels,
                         const LstmParams& params, std::span<double> grad_out) {
    const std::size_t h = params.shape.hidden;
    const std::size_t cn = params.shape.concat();
    const std::size_t p = params.shape.output;
    if (cache.shape != params.shape)
        throw std::invalid_argument("backward: cache was built for a different model shape");
    if (cache.params_stamp != params_stamp(params))
        throw std::invalid_argument("backward: cache is stale for these parameters");
    if (labels.size() != p) throw std::invalid_argument("backward: label length mismatch");
    if (grad_out.size() != params.shape.param_count())
        throw std::invalid_argument("backward: gradient buffer size mismatch");

    const std::size_t w_all_off = 0;
    const std::size_t b_all_off = params.shape.gate_weight_count();
    const std::size_t w_out_off = b_all_off + 4 * h;
    const std::size_t b_out_off = w_out_off + p * h;

    // Output head.  Clamped outputs are locally flat, so they contribute zero.
    std::vector<double> dlogit(p);
    for (std::size_t j = 0; j < p; ++j) {
        const double raw = cache.d_raw[j];
        dlogit[j] = (raw > kProbClamp && raw < 1.0 - kProbClamp)
                        ? raw - static_cast<double>(labels[j])
                        : 0.0;
    }
    kernels::ger_acc(grad_out.data() + w_out_off, p, h, 1.0, dlogit.data(), cache.s_final.data());
    for (std::size_t j = 0; j < p; ++j) grad_out[b_out_off + j] += dlogit[j];

    std::vector<double> ds(h, 0.0);
    kernels::gemv_t_acc(params.w_out().data(), p, h, dlogit.data(), ds.data());

    std::vector<double> dc(h, 0.0);
    std::vector<double> da(4 * h);
    std::vector<double> dz(cn);
    for (std::size_t t = cache.steps.size(); t-- > 0;) {
        const StepCache& step = cache.steps[t];
        const std::vector<double>* c_prev = t > 0 ? &cache.steps[t - 1].c : nullptr;
        for (std::size_t j = 0; j < h; ++j) {
            const double tc = step.tanh_c[j];
            const double do_j = ds[j] * tc;
            dc[j] += ds[j] * step.o[j] * (1.0 - tc * tc);
            const double cp = c_prev ? (*c_prev)[j] : 0.0;
            const double df_j = dc[j] * cp;
            const double di_j = dc[j] * step.g[j];
            const double dg_j = dc[j] * step.i[j];
            da[j] = df_j * step.f[j] * (1.0 - step.f[j]);
            da[h + j] = di_j * step.i[j] * (1.0 - step.i[j]);
            da[2 * h + j] = dg_j * (1.0 - step.g[j] * step.g[j]);
            da[3 * h + j] = do_j * step.o[j] * (1.0 - step.o[j]);
            dc[j] *= step.f[j];  // becomes dc_{t-1}
        }
        kernels::ger_acc(grad_out.data() + w_all_off, 4 * h, cn, 1.0, da.data(), step.z.data());
        for (std::size_t j = 0; j < 4 * h; ++j) grad_out[b_all_off + j] += da[j];
        std::fill(dz.begin(), dz.end(), 0.0);
        kernels::gemv_t_acc(params.w_all().data(), 4 * h, cn, da.data(), dz.data());
        std::copy(dz.begin(), dz.begin() + static_cast<std::ptrdiff_t>(h), ds.begin());
    }
}

std::vector<double> backward(const ForwardCache& cache, std::span<const std::uint8_t> labels,
                             const LstmParams& params, double weight_decay) {
    std::vector<double> grad(params.shape.param_count(), 0.0);
    backward_accumulate(cache, labels, params, grad);
    if (weight_decay != 0.0) {
        kernels::axpy(weight_decay, params.w_all().data(), grad.data(), params.w_all().size());
        const std::size_t w_out_off = params.shape.gate_weight_count() + 4 * params.shape.hidden;
        kernels::axpy(weight_decay, params.w_out().data(), grad.data() + w_out_off,
                      params.w_out().size());
    }
    return grad;
}

void clip_gradients(std::span<double> grads, double threshold) {
    if (threshold <= 0.0) throw std::invalid_argument("clip_gradients: threshold must be positive");
    const double norm = std::sqrt(kernels::sum_sq(grads.data(), grads.size()));
    if (norm > threshold) kernels::scal(threshold / norm, grads.data(), grads.size());
}

void ModelBank::validate(std::size_t total_bits) const {
    if (models.empty()) throw std::invalid_argument("model bank: no group models");
    const LstmShape& first = models.front().shape;
    for (const auto& m : models) {
        if (m.shape != first) throw std::invalid_argument("model bank: inconsistent model shapes");
        if (m.data.size() != m.shape.param_count())
            throw std::invalid_argument("model bank: parameter buffer size mismatch");
    }
    if (first.feature != layout.features_per_step)
        throw std::invalid_argument("model bank: layout feature width does not match the models");
    if (first.output * models.size() != total_bits)
        throw std::invalid_argument("model bank: group models do not cover the data block");
}

std::size_t group_count(std::size_t total_bits, std::size_t group_bits) {
    if (group_bits == 0 || total_bits == 0)
        throw std::invalid_argument("group_count: sizes must be positive");
    if (total_bits % group_bits != 0)
        throw std::invalid_argument("group_count: group size must divide the data bit count");
    return total_bits / group_bits;
}

std::vector<std::uint8_t> predict_bits(const cvec& frame_rx_time, const ModelBank& bank,
                                       const OfdmConfig& config) {
    const std::size_t block = config.block_length();
    if (frame_rx_time.size() != 2 * block)
        throw std::invalid_argument("predict_bits: expected a serialized two-block frame");
    bank.validate(config.data_bit_count());

    const cvec rx_pilot(frame_rx_time.begin(), frame_rx_time.begin() + static_cast<std::ptrdiff_t>(block));
    const cvec rx_data(frame_rx_time.begin() + static_cast<std::ptrdiff_t>(block), frame_rx_time.end());
    const std::vector<double> features =
        frame_features(ofdm_demodulate(rx_pilot, config), ofdm_demodulate(rx_data, config));
    if (features.size() != bank.layout.timesteps * bank.layout.features_per_step)
        throw std::invalid_argument("predict_bits: frame features do not match the bank layout");

    const std::size_t p = bank.group_bits();
    std::vector<std::uint8_t> bits(config.data_bit_count());
    for (std::size_t g = 0; g < bank.models.size(); ++g) {
        const ForwardCache cache = forward(features, bank.models[g], bank.layout);
        for (std::size_t j = 0; j < p; ++j)
            bits[g * p + j] = cache.d_hat[j] > 0.5 ? 1 : 0;
    }
    return bits;
}

} // namespace ofdmdet
