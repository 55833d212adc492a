#include "erw/linalg.hpp"

#include "erw/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace erw {

bool try_cholesky_in_place(Matrix& m) {
    const std::size_t n = m.n;
    for (std::size_t i = 0; i < n; ++i) {
        double* ri = m.row(i);
        for (std::size_t j = 0; j < i; ++j) {
            const double* rj = m.row(j);
            ri[j] = (ri[j] - kernels::dot(ri, rj, j)) / rj[j];
        }
        const double d = ri[i] - kernels::dot(ri, ri, i);
        if (!(d > 0.0)) return false;
        ri[i] = std::sqrt(d);
        for (std::size_t j = i + 1; j < n; ++j) ri[j] = 0.0;
    }
    return true;
}

void cholesky_in_place(Matrix& m) {
    if (!try_cholesky_in_place(m))
        throw std::runtime_error("cholesky: matrix is not positive definite");
}

std::vector<double> lower_matvec(const Matrix& l, std::span<const double> z) {
    if (z.size() != l.n) throw std::invalid_argument("lower_matvec: size mismatch");
    std::vector<double> x(l.n);
    for (std::size_t i = 0; i < l.n; ++i)
        x[i] = kernels::dot(l.row(i), z.data(), i + 1);
    return x;
}

void add_to_diagonal(Matrix& m, double value) {
    for (std::size_t i = 0; i < m.n; ++i) m.at(i, i) += value;
}

} // namespace erw
