#pragma once

#include "ofdmdet/constellation.hpp"
#include "ofdmdet/numerics.hpp"

#include <cstdint>
#include <vector>

namespace ofdmdet {

struct OfdmConfig {
    std::size_t subcarriers = 64;   // N, power of two
    std::size_t cyclic_prefix = 16; // N_cp samples, 0 allowed
    std::size_t pilot_count = 8;    // comb layout, must divide N
    Modulation modulation = Modulation::Qpsk;
    double symbol_duration = 1e-3;  // T seconds, informational

    std::size_t block_length() const { return subcarriers + cyclic_prefix; } // N_T
    double sample_period() const { return symbol_duration / static_cast<double>(block_length()); }
    std::size_t data_bit_count() const {
        return subcarriers * static_cast<std::size_t>(bits_per_symbol(modulation));
    }
    /// Comb positions {0, N/P, 2N/P, ...}.
    std::vector<std::size_t> pilot_positions() const;

    void validate() const; // throws std::invalid_argument on any violated invariant
};

// One transmit frame: a pilot block followed by a data block.  The pilot
// block carries the fixed known sequence on every subcarrier; the comb
// positions within it are the ones the classical estimators read.
struct OfdmFrame {
    cvec pilot_block_freq;
    cvec data_block_freq;
    std::vector<std::uint8_t> data_bits;
    std::vector<std::size_t> pilot_positions;
};

/// Fixed pseudo-random unit-energy QPSK sequence, identical at the
/// transmitter and receiver (seeded with kPilotSeed).
cvec pilot_sequence(std::size_t n);
inline constexpr std::uint64_t kPilotSeed = 0x0fd3c0de5eedULL;

OfdmFrame build_frame(const std::vector<std::uint8_t>& data_bits,
                      const cvec& pilot_seq, const OfdmConfig& config);

/// Unitary inverse transform plus cyclic prefix: returns N_cp + N samples.
cvec ofdm_modulate(const cvec& block_freq, const OfdmConfig& config);

/// Drops the cyclic prefix and applies the forward unitary transform.
cvec ofdm_demodulate(const cvec& y, const OfdmConfig& config);

/// Time-domain serialization of both blocks, length 2 * (N + N_cp).
cvec serialize_frame(const OfdmFrame& frame, const OfdmConfig& config);

} // namespace ofdmdet
