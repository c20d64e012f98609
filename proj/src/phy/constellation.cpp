#include "ofdmdet/constellation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ofdmdet {

int bits_per_symbol(Modulation m) { return m == Modulation::Qpsk ? 2 : 4; }

const char* modulation_name(Modulation m) { return m == Modulation::Qpsk ? "qpsk" : "16qam"; }

Modulation modulation_from_name(const std::string& name) {
    if (name == "qpsk") return Modulation::Qpsk;
    if (name == "16qam" || name == "qam16") return Modulation::Qam16;
    throw std::invalid_argument("unknown modulation: " + name);
}

namespace {

Constellation make_qpsk() {
    Constellation c;
    c.bits = 2;
    const double s = 1.0 / std::sqrt(2.0);
    c.points.resize(4);
    for (int label = 0; label < 4; ++label) {
        const int b1 = (label >> 1) & 1;
        const int b0 = label & 1;
        c.points[label] = {(1 - 2 * b1) * s, (1 - 2 * b0) * s};
    }
    return c;
}

Constellation make_qam16() {
    Constellation c;
    c.bits = 4;
    const double s = 1.0 / std::sqrt(10.0);
    // Gray pair -> amplitude level.
    const auto level = [](int pair) {
        switch (pair) {
            case 0b00: return -3.0;
            case 0b01: return -1.0;
            case 0b11: return +1.0;
            default: return +3.0; // 0b10
        }
    };
    c.points.resize(16);
    for (int label = 0; label < 16; ++label) {
        const int i_pair = (label >> 2) & 3;
        const int q_pair = label & 3;
        c.points[label] = {level(i_pair) * s, level(q_pair) * s};
    }
    return c;
}

} // namespace

const Constellation& Constellation::get(Modulation m) {
    static const Constellation qpsk = make_qpsk();
    static const Constellation qam16 = make_qam16();
    return m == Modulation::Qpsk ? qpsk : qam16;
}

std::size_t Constellation::nearest(std::complex<double> y) const {
    std::size_t best = 0;
    double best_d = std::norm(y - points[0]);
    for (std::size_t i = 1; i < points.size(); ++i) {
        const double d = std::norm(y - points[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

cvec map_bits(const std::vector<std::uint8_t>& bits, Modulation m) {
    const auto& c = Constellation::get(m);
    const std::size_t b = static_cast<std::size_t>(c.bits);
    if (bits.size() % b != 0)
        throw std::invalid_argument("map_bits: bit count not divisible by bits per symbol");
    cvec out(bits.size() / b);
    for (std::size_t s = 0; s < out.size(); ++s) {
        std::size_t label = 0;
        for (std::size_t j = 0; j < b; ++j) label = (label << 1) | (bits[s * b + j] & 1u);
        out[s] = c.points[label];
    }
    return out;
}

std::vector<std::uint8_t> demap_symbols(const cvec& symbols, Modulation m) {
    const auto& c = Constellation::get(m);
    const std::size_t b = static_cast<std::size_t>(c.bits);
    std::vector<std::uint8_t> bits(symbols.size() * b);
    for (std::size_t s = 0; s < symbols.size(); ++s) {
        const std::size_t label = c.nearest(symbols[s]);
        for (std::size_t j = 0; j < b; ++j)
            bits[s * b + j] = static_cast<std::uint8_t>((label >> (b - 1 - j)) & 1u);
    }
    return bits;
}

} // namespace ofdmdet
