#include "ofdmdet/kernels.hpp"

namespace ofdmdet::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double sum_sq_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scal_scalar(double alpha, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void gemv_scalar(const double* a, std::size_t rows, std::size_t cols,
                 const double* x, const double* bias, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = a + r * cols;
        double acc = 0.0;
        for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
        y[r] = bias ? acc + bias[r] : acc;
    }
}

void gemv_t_acc_scalar(const double* a, std::size_t rows, std::size_t cols,
                       const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = a + r * cols;
        const double xr = x[r];
        for (std::size_t c = 0; c < cols; ++c) y[c] += row[c] * xr;
    }
}

void ger_acc_scalar(double* a, std::size_t rows, std::size_t cols,
                    double alpha, const double* u, const double* v) {
    for (std::size_t r = 0; r < rows; ++r) {
        double* row = a + r * cols;
        const double au = alpha * u[r];
        for (std::size_t c = 0; c < cols; ++c) row[c] += au * v[c];
    }
}

void cmul_scalar(const std::complex<double>* a, const std::complex<double>* b,
                 std::complex<double>* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

} // namespace

const Ops scalar_ops = {
    dot_scalar,   sum_sq_scalar,     axpy_scalar,    scal_scalar,
    gemv_scalar,  gemv_t_acc_scalar, ger_acc_scalar, cmul_scalar,
};

} // namespace ofdmdet::kernels
