#include "ofdmdet/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ofdmdet {

PowerDelayProfile PowerDelayProfile::exponential(double tau, std::size_t c_h) {
    if (tau <= 0.0) throw std::invalid_argument("PowerDelayProfile: tau must be positive");
    std::vector<double> v(c_h + 1);
    for (std::size_t m = 0; m <= c_h; ++m) v[m] = std::exp(-static_cast<double>(m) / tau);
    return from_variances(std::move(v));
}

PowerDelayProfile PowerDelayProfile::from_variances(std::vector<double> variances) {
    if (variances.empty()) throw std::invalid_argument("PowerDelayProfile: no taps");
    double total = 0.0;
    for (double v : variances) {
        if (v < 0.0 || !std::isfinite(v))
            throw std::invalid_argument("PowerDelayProfile: tap variances must be finite and nonnegative");
        total += v;
    }
    if (total <= 0.0) throw std::invalid_argument("PowerDelayProfile: zero total energy");
    for (double& v : variances) v /= total;
    return PowerDelayProfile{std::move(variances)};
}

ChannelRealization draw_channel(const PowerDelayProfile& pdp, RngStream& rng) {
    ChannelRealization h;
    h.taps.resize(pdp.tap_variances.size());
    for (std::size_t m = 0; m < h.taps.size(); ++m)
        h.taps[m] = sample_complex_gaussian(rng, pdp.tap_variances[m]);
    return h;
}

namespace {

cvec convolve(const cvec& tx, const cvec& taps, ChannelMode mode, std::size_t block_len) {
    const std::size_t n = tx.size();
    cvec y(n, {0.0, 0.0});
    if (mode == ChannelMode::CyclicPerBlock) {
        if (block_len == 0 || n % block_len != 0)
            throw std::invalid_argument("apply_channel: cyclic mode needs a block length dividing the input");
        if (taps.size() > block_len)
            throw std::invalid_argument("apply_channel: channel delay spread exceeds the block length");
        for (std::size_t start = 0; start < n; start += block_len) {
            for (std::size_t i = 0; i < block_len; ++i) {
                std::complex<double> acc = 0.0;
                for (std::size_t m = 0; m < taps.size(); ++m)
                    acc += taps[m] * tx[start + (i + block_len - m) % block_len];
                y[start + i] = acc;
            }
        }
    } else {
        if (taps.size() > n)
            throw std::invalid_argument("apply_channel: channel delay spread exceeds the frame");
        for (std::size_t i = 0; i < n; ++i) {
            std::complex<double> acc = 0.0;
            const std::size_t m_max = std::min(taps.size() - 1, i);
            for (std::size_t m = 0; m <= m_max; ++m) acc += taps[m] * tx[i - m];
            y[i] = acc;
        }
    }
    return y;
}

} // namespace

cvec apply_channel(const cvec& tx, const ChannelRealization& h, const NoiseSpec& noise,
                   RngStream& rng, ChannelMode mode, std::size_t block_len) {
    cvec y = convolve(tx, h.taps, mode, block_len);
    for (auto& v : y) v += sample_complex_gaussian(rng, noise.noise_variance);
    return y;
}

cvec frequency_response(const ChannelRealization& h, std::size_t n) {
    if (h.taps.size() > n)
        throw std::invalid_argument("frequency_response: more taps than subcarriers");
    cvec out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t m = 0; m < h.taps.size(); ++m) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(k * m) / static_cast<double>(n);
            acc += h.taps[m] * std::complex<double>{std::cos(ang), std::sin(ang)};
        }
        out[k] = acc;
    }
    return out;
}

NoiseSpec calibrate_noise(double snr_db, const cvec& tx, const ChannelRealization& h) {
    const cvec clean = convolve(tx, h.taps, ChannelMode::LinearOverFrame, 0);
    const double power = energy(clean) / static_cast<double>(clean.size());
    if (power <= 0.0) throw std::invalid_argument("calibrate_noise: zero signal power");
    return NoiseSpec{snr_db, power / std::pow(10.0, snr_db / 10.0)};
}

} // namespace ofdmdet
