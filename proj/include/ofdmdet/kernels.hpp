#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

namespace ofdmdet::kernels {

// Dense double-precision primitives behind the simulator's inner loops
// (LSTM gate matvecs, gradient accumulation, complex elementwise products).
// Each entry has a scalar reference implementation and, on x86-64, an AVX2
// variant selected at runtime.  Reductions (dot, sum_sq, gemv) may differ
// from the scalar path in the last ulps because the summation order differs.
struct Ops {
    // sum_i x[i] * y[i]
    double (*dot)(const double* x, const double* y, std::size_t n);
    // sum_i x[i]^2
    double (*sum_sq)(const double* x, std::size_t n);
    // y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // x[i] *= alpha
    void (*scal)(double alpha, double* x, std::size_t n);
    // y = A x + bias, A row-major rows x cols; bias may be null for y = A x
    void (*gemv)(const double* a, std::size_t rows, std::size_t cols,
                 const double* x, const double* bias, double* y);
    // y[j] += sum_i A[i][j] * x[i]  (y length cols, x length rows)
    void (*gemv_t_acc)(const double* a, std::size_t rows, std::size_t cols,
                       const double* x, double* y);
    // A[i][j] += alpha * u[i] * v[j]
    void (*ger_acc)(double* a, std::size_t rows, std::size_t cols,
                    double alpha, const double* u, const double* v);
    // out[i] = a[i] * b[i]
    void (*cmul)(const std::complex<double>* a, const std::complex<double>* b,
                 std::complex<double>* out, std::size_t n);
};

extern const Ops scalar_ops;

/// Active implementation. Picks the widest supported variant at first use;
/// the OFDMDET_KERNELS environment variable ("scalar"/"avx2") overrides.
const Ops& active();
std::string_view active_name();

/// Lookup by name for equivalence tests; nullptr when the variant is not
/// available on this host.
const Ops* by_name(std::string_view name);

/// Force a variant (tests only). Returns false if unavailable.
bool force(std::string_view name);

inline double dot(const double* x, const double* y, std::size_t n) { return active().dot(x, y, n); }
inline double sum_sq(const double* x, std::size_t n) { return active().sum_sq(x, n); }
inline void axpy(double alpha, const double* x, double* y, std::size_t n) { active().axpy(alpha, x, y, n); }
inline void scal(double alpha, double* x, std::size_t n) { active().scal(alpha, x, n); }
inline void gemv(const double* a, std::size_t rows, std::size_t cols,
                 const double* x, const double* bias, double* y) {
    active().gemv(a, rows, cols, x, bias, y);
}
inline void gemv_t_acc(const double* a, std::size_t rows, std::size_t cols,
                       const double* x, double* y) {
    active().gemv_t_acc(a, rows, cols, x, y);
}
inline void ger_acc(double* a, std::size_t rows, std::size_t cols,
                    double alpha, const double* u, const double* v) {
    active().ger_acc(a, rows, cols, alpha, u, v);
}
inline void cmul(const std::complex<double>* a, const std::complex<double>* b,
                 std::complex<double>* out, std::size_t n) {
    active().cmul(a, b, out, n);
}

} // namespace ofdmdet::kernels
