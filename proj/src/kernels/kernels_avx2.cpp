// AVX2/FMA variants. Compiled with -mavx2 -mfma; only dispatched to when the
// host CPU reports both (see kernels.cpp).

#if defined(__x86_64__) || defined(__i386__)

#include "ofdmdet/kernels.hpp"

#include <immintrin.h>

namespace ofdmdet::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double sum_sq_avx2(const double* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        acc0 = _mm256_fmadd_pd(v, v, acc0);
    }
    double acc = hsum(acc0);
    for (; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d r = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(y + i, r);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scal_avx2(double alpha, double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= alpha;
}

void gemv_avx2(const double* a, std::size_t rows, std::size_t cols,
               const double* x, const double* bias, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = a + r * cols;
        __m256d acc0 = _mm256_setzero_pd();
        __m256d acc1 = _mm256_setzero_pd();
        std::size_t c = 0;
        for (; c + 8 <= cols; c += 8) {
            acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row + c), _mm256_loadu_pd(x + c), acc0);
            acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(row + c + 4), _mm256_loadu_pd(x + c + 4), acc1);
        }
        for (; c + 4 <= cols; c += 4)
            acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row + c), _mm256_loadu_pd(x + c), acc0);
        double acc = hsum(_mm256_add_pd(acc0, acc1));
        for (; c < cols; ++c) acc += row[c] * x[c];
        y[r] = bias ? acc + bias[r] : acc;
    }
}

void gemv_t_acc_avx2(const double* a, std::size_t rows, std::size_t cols,
                     const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = a + r * cols;
        const __m256d xr = _mm256_set1_pd(x[r]);
        std::size_t c = 0;
        for (; c + 4 <= cols; c += 4) {
            __m256d v = _mm256_fmadd_pd(xr, _mm256_loadu_pd(row + c), _mm256_loadu_pd(y + c));
            _mm256_storeu_pd(y + c, v);
        }
        const double xs = x[r];
        for (; c < cols; ++c) y[c] += row[c] * xs;
    }
}

void ger_acc_avx2(double* a, std::size_t rows, std::size_t cols,
                  double alpha, const double* u, const double* v) {
    for (std::size_t r = 0; r < rows; ++r) {
        double* row = a + r * cols;
        const double au = alpha * u[r];
        const __m256d vau = _mm256_set1_pd(au);
        std::size_t c = 0;
        for (; c + 4 <= cols; c += 4) {
            __m256d t = _mm256_fmadd_pd(vau, _mm256_loadu_pd(v + c), _mm256_loadu_pd(row + c));
            _mm256_storeu_pd(row + c, t);
        }
        for (; c < cols; ++c) row[c] += au * v[c];
    }
}

// Interleaved [re, im] layout, two complex values per 256-bit lane.
void cmul_avx2(const std::complex<double>* a, const std::complex<double>* b,
               std::complex<double>* out, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    double* po = reinterpret_cast<double*>(out);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d va = _mm256_loadu_pd(pa + 2 * i);
        __m256d vb = _mm256_loadu_pd(pb + 2 * i);
        __m256d b_re = _mm256_movedup_pd(vb);
        __m256d b_im = _mm256_permute_pd(vb, 0xF);
        __m256d a_sw = _mm256_permute_pd(va, 0x5);
        __m256d r = _mm256_fmaddsub_pd(va, b_re, _mm256_mul_pd(a_sw, b_im));
        _mm256_storeu_pd(po + 2 * i, r);
    }
    for (; i < n; ++i) {
        const double ar = pa[2 * i], ai = pa[2 * i + 1];
        const double br = pb[2 * i], bi = pb[2 * i + 1];
        po[2 * i] = ar * br - ai * bi;
        po[2 * i + 1] = ar * bi + ai * br;
    }
}

} // namespace

// `extern` is required: a const object at namespace scope otherwise has
// internal linkage, and the dispatcher in kernels.cpp could not find it.
extern const Ops avx2_ops;
const Ops avx2_ops = {
    dot_avx2,  sum_sq_avx2,     axpy_avx2,    scal_avx2,
    gemv_avx2, gemv_t_acc_avx2, ger_acc_avx2, cmul_avx2,
};

} // namespace ofdmdet::kernels

#endif // x86
