#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "ofdmdet/numerics.hpp"

namespace ofdmdet {

// Dense column-agnostic row-major complex matrix, sized n*n for the solvers below.
struct CholeskyResult {
    // Lower-triangular factor L with A = L L^H, stored row-major (n x n).
    cvec factor;
    std::size_t n = 0;
    // min diag(L) / max diag(L): a crude conditioning probe; tiny values flag
    // near-singular inputs before they turn into NaNs downstream.
    double diag_ratio = 1.0;
};

// Cholesky factorization of a Hermitian positive-definite matrix (row-major n x n).
// Throws std::runtime_error if a pivot is not strictly positive.
CholeskyResult cholesky(const cvec& a, std::size_t n);

// Solve A x = b given the factor from cholesky() via forward/back substitution.
cvec cholesky_solve(const CholeskyResult& chol, const cvec& b);

// Convenience: solve A X = B for n x m right-hand side (row-major), returning X.
cvec cholesky_solve_multi(const CholeskyResult& chol, const cvec& b, std::size_t m);

} // namespace ofdmdet
