#pragma once

#include "ofdmdet/numerics.hpp"

#include <cstdint>
#include <vector>

namespace ofdmdet {

enum class Modulation { Qpsk, Qam16 };

int bits_per_symbol(Modulation m);
const char* modulation_name(Modulation m);
Modulation modulation_from_name(const std::string& name);

// Unit-average-energy Gray-labelled constellation. points[i] is the symbol
// whose bit label is the binary expansion of i, first bit most significant.
//
// QPSK: label (b1,b0) -> ((1-2*b1) + j*(1-2*b0)) / sqrt(2).
// 16QAM: (b3,b2) pick the in-phase level and (b1,b0) the quadrature level,
// Gray order 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3, scaled by 1/sqrt(10).
// The convention is frozen by tests/data/constellation_golden.csv.
struct Constellation {
    std::vector<std::complex<double>> points;
    int bits;

    static const Constellation& get(Modulation m);

    /// Index of the nearest point in Euclidean distance; ties resolve to the
    /// lowest index.
    std::size_t nearest(std::complex<double> y) const;
};

/// Gray-maps each group of bits_per_symbol bits to one constellation point.
cvec map_bits(const std::vector<std::uint8_t>& bits, Modulation m);

/// Hard decision back to bits (nearest point, ties to the lowest index).
std::vector<std::uint8_t> demap_symbols(const cvec& symbols, Modulation m);

} // namespace ofdmdet
