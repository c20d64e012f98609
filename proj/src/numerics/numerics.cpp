#include "ofdmdet/numerics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ofdmdet {

cvec dft(const cvec& x, bool inverse) {
    const std::size_t n = x.size();
    if (!is_pow2(n)) throw std::invalid_argument("dft: length must be a power of two");

    cvec a(n);
    // Bit-reversal permutation.
    std::size_t log2n = 0;
    while ((std::size_t{1} << log2n) < n) ++log2n;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t rev = 0;
        for (std::size_t b = 0; b < log2n; ++b) rev |= ((i >> b) & 1u) << (log2n - 1 - b);
        a[rev] = x[i];
    }

    const double sign = inverse ? 1.0 : -1.0;
    std::vector<std::complex<double>> twiddle(n / 2 > 0 ? n / 2 : 1);
    for (std::size_t j = 0; j < n / 2; ++j) {
        const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
        twiddle[j] = {std::cos(ang), std::sin(ang)};
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t step = n / len;
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t j = 0; j < half; ++j) {
                const auto w = twiddle[j * step];
                const auto t = w * a[start + half + j];
                a[start + half + j] = a[start + j] - t;
                a[start + j] += t;
            }
        }
    }

    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& v : a) v *= scale;
    return a;
}

cvec interpolate_frequency(const std::vector<std::size_t>& positions,
                           const cvec& values, std::size_t n) {
    if (positions.empty()) throw std::invalid_argument("interpolate_frequency: no positions");
    if (positions.size() != values.size())
        throw std::invalid_argument("interpolate_frequency: positions/values length mismatch");
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (positions[i] >= n)
            throw std::invalid_argument("interpolate_frequency: position out of range");
        if (i > 0 && positions[i] <= positions[i - 1])
            throw std::invalid_argument("interpolate_frequency: positions must be strictly increasing");
    }

    const std::size_t count = positions.size();
    cvec out(n);
    for (std::size_t seg = 0; seg < count; ++seg) {
        const std::size_t p0 = positions[seg];
        const bool last = seg + 1 == count;
        const std::size_t p1 = last ? positions[0] : positions[seg + 1];
        const std::size_t gap = last ? (n - p0 + p1) : (p1 - p0);
        const auto v0 = values[seg];
        const auto v1 = last ? values[0] : values[seg + 1];
        for (std::size_t off = 0; off < gap; ++off) {
            const std::size_t k = (p0 + off) % n;
            const double t = static_cast<double>(off) / static_cast<double>(gap);
            out[k] = v0 * (1.0 - t) + v1 * t;
        }
    }
    return out;
}

double energy(const cvec& x) {
    double acc = 0.0;
    for (const auto& v : x) acc += std::norm(v);
    return acc;
}

} // namespace ofdmdet
