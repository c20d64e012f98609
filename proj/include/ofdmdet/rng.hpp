#pragma once

#include <complex>
#include <cstdint>

namespace ofdmdet {

// Deterministic splittable random stream (PCG-XSH-RR 64/32).  Equal
// (seed, stream_id) pairs produce bitwise-identical sequences on every
// platform; distinct stream_ids select statistically independent sequences.
//
// Stream-id allocation used across the project, packed as
//   (tag << 56) | (snr_index << 40) | frame_index
// with tags: 1 data bits, 2 channel taps, 3 noise, 4 training snr draw,
// 5 shuffle, 6 weight init.  Single-purpose streams just use the tag field.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    /// Uniform on [0, 1) with 53 random bits.
    double next_unit();

    /// Uniform on [lo, hi).
    double next_range(double lo, double hi);

    /// Uniform integer in [0, bound) without modulo bias.
    std::uint64_t next_below(std::uint64_t bound);

private:
    std::uint64_t state_;
    std::uint64_t inc_;
};

/// One draw from CN(0, total_variance): real and imaginary parts are
/// independent zero-mean Gaussians with variance total_variance/2 each
/// (Box-Muller from the uniform stream). Throws on negative variance.
std::complex<double> sample_complex_gaussian(RngStream& rng, double total_variance);

namespace stream_tag {
inline constexpr std::uint64_t bits = 1, channel = 2, noise = 3, snr_draw = 4,
                               shuffle = 5, weight_init = 6;
}

inline constexpr std::uint64_t make_stream_id(std::uint64_t tag, std::uint64_t snr_index,
                                              std::uint64_t frame_index) {
    return (tag << 56) | (snr_index << 40) | frame_index;
}

} // namespace ofdmdet
