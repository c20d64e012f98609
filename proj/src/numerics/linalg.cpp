#include "ofdmdet/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ofdmdet {

CholeskyResult cholesky(const cvec& a, std::size_t n) {
    if (a.size() != n * n) throw std::invalid_argument("cholesky: size mismatch");
    CholeskyResult res;
    res.n = n;
    res.factor.assign(n * n, {0.0, 0.0});
    cvec& l = res.factor;
    double dmin = 0.0, dmax = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a[j * n + j].real();
        for (std::size_t k = 0; k < j; ++k) diag -= std::norm(l[j * n + k]);
        if (!(diag > 0.0) || !std::isfinite(diag))
            throw std::runtime_error("cholesky: matrix is not positive definite");
        const double d = std::sqrt(diag);
        l[j * n + j] = d;
        if (j == 0) {
            dmin = dmax = d;
        } else {
            dmin = std::min(dmin, d);
            dmax = std::max(dmax, d);
        }
        for (std::size_t i = j + 1; i < n; ++i) {
            std::complex<double> acc = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) acc -= l[i * n + k] * std::conj(l[j * n + k]);
            l[i * n + j] = acc / d;
        }
    }
    res.diag_ratio = dmax > 0.0 ? dmin / dmax : 0.0;
    return res;
}

cvec cholesky_solve(const CholeskyResult& chol, const cvec& b) {
    return cholesky_solve_multi(chol, b, 1);
}

cvec cholesky_solve_multi(const CholeskyResult& chol, const cvec& b, std::size_t m) {
    const std::size_t n = chol.n;
    if (b.size() != n * m) throw std::invalid_argument("cholesky_solve: size mismatch");
    const cvec& l = chol.factor;
    cvec x = b;
    // Forward: L y = b.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k) {
            const std::complex<double> lik = l[i * n + k];
            for (std::size_t c = 0; c < m; ++c) x[i * m + c] -= lik * x[k * m + c];
        }
        const double d = l[i * n + i].real();
        for (std::size_t c = 0; c < m; ++c) x[i * m + c] /= d;
    }
    // Backward: L^H x = y.
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t k = ii + 1; k < n; ++k) {
            const std::complex<double> lki = std::conj(l[k * n + ii]);
            for (std::size_t c = 0; c < m; ++c) x[ii * m + c] -= lki * x[k * m + c];
        }
        const double d = l[ii * n + ii].real();
        for (std::size_t c = 0; c < m; ++c) x[ii * m + c] /= d;
    }
    return x;
}

} // namespace ofdmdet
