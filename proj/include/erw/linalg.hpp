#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace erw {

// Dense row-major square matrix, just enough for GP covariance work.
struct Matrix {
    std::size_t n = 0;
    std::vector<double> a;

    Matrix() = default;
    explicit Matrix(std::size_t size) : n(size), a(size * size, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
    double* row(std::size_t i) { return a.data() + i * n; }
    const double* row(std::size_t i) const { return a.data() + i * n; }
};

// In-place lower Cholesky (Cholesky–Crout row order; inner loops are
// contiguous dot products). Reads the lower triangle, zeroes the upper.
// Returns false if a pivot is not strictly positive.
bool try_cholesky_in_place(Matrix& m);

// Throwing wrapper for callers that have already conditioned the matrix.
void cholesky_in_place(Matrix& m);

// x = L z for lower-triangular L.
std::vector<double> lower_matvec(const Matrix& l, std::span<const double> z);

void add_to_diagonal(Matrix& m, double value);

} // namespace erw
