#include "ofdmdet/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ofdmdet {

namespace {
constexpr std::uint64_t kPcgMult = 6364136223846793005ULL;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) {
    inc_ = (stream_id << 1u) | 1u;
    state_ = 0;
    next_u32();
    state_ += seed;
    next_u32();
}

std::uint32_t RngStream::next_u32() {
    const std::uint64_t old = state_;
    state_ = old * kPcgMult + inc_;
    const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    const auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
}

double RngStream::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_range(double lo, double hi) {
    return lo + (hi - lo) * next_unit();
}

std::uint64_t RngStream::next_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("next_below: bound must be positive");
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = next_u64();
        if (r >= threshold) return r % bound;
    }
}

std::complex<double> sample_complex_gaussian(RngStream& rng, double total_variance) {
    if (total_variance < 0.0)
        throw std::invalid_argument("sample_complex_gaussian: negative variance");
    // u1 in (0, 1] keeps the log finite; a zero variance collapses to exactly 0.
    const double u1 = 1.0 - rng.next_unit();
    const double u2 = rng.next_unit();
    const double radius = std::sqrt(-2.0 * std::log(u1)) * std::sqrt(total_variance * 0.5);
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

} // namespace ofdmdet
