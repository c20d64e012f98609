#include "ofdmdet/ofdm.hpp"

#include "ofdmdet/rng.hpp"

#include <numbers>
#include <stdexcept>

namespace ofdmdet {

std::vector<std::size_t> OfdmConfig::pilot_positions() const {
    std::vector<std::size_t> pos(pilot_count);
    const std::size_t spacing = subcarriers / pilot_count;
    for (std::size_t i = 0; i < pilot_count; ++i) pos[i] = i * spacing;
    return pos;
}

void OfdmConfig::validate() const {
    if (!is_pow2(subcarriers))
        throw std::invalid_argument("OfdmConfig: subcarrier count must be a power of two");
    if (cyclic_prefix >= subcarriers)
        throw std::invalid_argument("OfdmConfig: cyclic prefix must be shorter than a block");
    if (pilot_count < 1 || pilot_count > subcarriers)
        throw std::invalid_argument("OfdmConfig: pilot count out of range");
    if (subcarriers % pilot_count != 0)
        throw std::invalid_argument("OfdmConfig: pilot count must divide the subcarrier count");
    if (symbol_duration <= 0.0)
        throw std::invalid_argument("OfdmConfig: symbol duration must be positive");
}

cvec pilot_sequence(std::size_t n) {
    // A pseudorandom antipodal sequence on a single constellation point.  The
    // receiver only relies on the block being known and unit-modulus, but
    // keeping every cross-carrier product P(u)·conj(P(v)) real (±1) is what
    // lets group-shared training fold its carrier alignment into per-group
    // weights (see train_bank_shared).
    RngStream rng(kPilotSeed, 0);
    const std::complex<double> q{std::numbers::inv_sqrt2, std::numbers::inv_sqrt2};
    cvec out(n);
    for (auto& p : out) p = (rng.next_u32() & 1u) != 0 ? -q : q;
    return out;
}

OfdmFrame build_frame(const std::vector<std::uint8_t>& data_bits,
                      const cvec& pilot_seq, const OfdmConfig& config) {
    config.validate();
    if (data_bits.size() != config.data_bit_count())
        throw std::invalid_argument("build_frame: data bit count mismatch");
    if (pilot_seq.size() < config.subcarriers)
        throw std::invalid_argument("build_frame: pilot sequence shorter than a block");

    OfdmFrame frame;
    frame.data_bits = data_bits;
    frame.pilot_positions = config.pilot_positions();
    frame.pilot_block_freq.assign(pilot_seq.begin(),
                                  pilot_seq.begin() + static_cast<std::ptrdiff_t>(config.subcarriers));
    frame.data_block_freq = map_bits(data_bits, config.modulation);
    return frame;
}

cvec ofdm_modulate(const cvec& block_freq, const OfdmConfig& config) {
    if (block_freq.size() != config.subcarriers)
        throw std::invalid_argument("ofdm_modulate: block length mismatch");
    const cvec d = dft(block_freq, true);
    cvec out;
    out.reserve(config.block_length());
    out.insert(out.end(), d.end() - static_cast<std::ptrdiff_t>(config.cyclic_prefix), d.end());
    out.insert(out.end(), d.begin(), d.end());
    return out;
}

cvec ofdm_demodulate(const cvec& y, const OfdmConfig& config) {
    if (y.size() != config.block_length())
        throw std::invalid_argument("ofdm_demodulate: input length mismatch");
    const cvec body(y.begin() + static_cast<std::ptrdiff_t>(config.cyclic_prefix), y.end());
    return dft(body, false);
}

cvec serialize_frame(const OfdmFrame& frame, const OfdmConfig& config) {
    cvec out = ofdm_modulate(frame.pilot_block_freq, config);
    const cvec data = ofdm_modulate(frame.data_block_freq, config);
    out.insert(out.end(), data.begin(), data.end());
    return out;
}

} // namespace ofdmdet
