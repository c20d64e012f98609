#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace ofdmdet {

using cvec = std::vector<std::complex<double>>;

inline bool is_pow2(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

/// Unitary DFT (1/sqrt(N) scaling in both directions).  Forward uses the
/// exp(-j2*pi*kn/N) convention.  Length must be a power of two.
cvec dft(const cvec& x, bool inverse);

/// Extends samples known at `positions` (strictly increasing subcarrier
/// indices in [0, n)) to all n subcarriers by linear interpolation of the
/// real and imaginary parts, wrapping cyclically between the last and first
/// position.
cvec interpolate_frequency(const std::vector<std::size_t>& positions,
                           const cvec& values, std::size_t n);

double energy(const cvec& x);

} // namespace ofdmdet
