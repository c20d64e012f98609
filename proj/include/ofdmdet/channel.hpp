#pragma once

#include "ofdmdet/numerics.hpp"
#include "ofdmdet/rng.hpp"

#include <vector>

namespace ofdmdet {

// Per-tap total complex variances of a sample-spaced tapped delay line,
// normalized to unit channel energy.
struct PowerDelayProfile {
    std::vector<double> tap_variances;

    std::size_t max_delay() const { return tap_variances.size() - 1; } // C_h

    /// tap_variances[m] proportional to exp(-m / tau), m = 0..c_h.
    static PowerDelayProfile exponential(double tau, std::size_t c_h);
    /// Normalizes the given variances to unit total energy.
    static PowerDelayProfile from_variances(std::vector<double> variances);
};

struct ChannelRealization {
    cvec taps; // h_0 .. h_{C_h}
    std::size_t max_delay() const { return taps.size() - 1; }
};

struct NoiseSpec {
    double snr_db = 0.0;
    double noise_variance = 0.0; // total complex variance per sample
};

enum class ChannelMode {
    CyclicPerBlock,  // circular convolution of each length-block_len block
    LinearOverFrame, // linear convolution of the whole serialized frame
};

/// Independent complex-Gaussian tap draw, one per profile entry.
ChannelRealization draw_channel(const PowerDelayProfile& pdp, RngStream& rng);

/// Applies the tapped delay line and adds white complex-Gaussian noise of
/// the given per-sample variance.  Cyclic mode requires block_len > 0
/// dividing the input length and max delay < block_len.
cvec apply_channel(const cvec& tx, const ChannelRealization& h, const NoiseSpec& noise,
                   RngStream& rng, ChannelMode mode, std::size_t block_len = 0);

/// H_k = sum_m h_m exp(-j 2 pi k m / n): the unnormalized transform of the
/// zero-padded taps, so that with unitary signal transforms the per-subcarrier
/// model Y = H * D + E holds exactly under circular convolution.
cvec frequency_response(const ChannelRealization& h, std::size_t n);

/// Noise variance from the average received (post-channel, pre-noise) power
/// of this transmission at the requested SNR.  Deterministic given inputs.
NoiseSpec calibrate_noise(double snr_db, const cvec& tx, const ChannelRealization& h);

} // namespace ofdmdet
