#pragma once

#include <cstddef>

namespace erw::kernels {

// Arithmetic inner loops used by the hot paths (Cholesky, Sobol batches,
// likelihood sums, bootstrap reductions). Each kernel has a scalar
// reference implementation and an AVX2+FMA variant; the backend is chosen
// once at runtime from cpuid and can be overridden (tests, --simd flag).
// Variants are equivalence-tested against the scalar reference; they may
// differ by floating-point reassociation only.

enum class Backend { scalar, avx2 };

Backend active_backend();
bool backend_supported(Backend b);
// Throws std::runtime_error if the requested backend is not supported here.
void force_backend(Backend b);
const char* backend_name(Backend b);

double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
// y += a * x
void axpy(double a, const double* x, double* y, std::size_t n);
// sum of squared differences, sum_i (x_i - y_i)^2
double sum_sq_diff(const double* x, const double* y, std::size_t n);

// Batched single-core mixed concentration (structure of arrays, length n):
//   mf  = rate*gamma*(1-bulk_loss)
//   h   = mf / feed_density           (0 when mf == 0)
//   ms  = soil_density * (depth - h)
//   out = (rate*gamma*(1-elem_loss)*feed_conc + ms*soil_conc) / (mf + ms)
// No validation: callers guarantee h < depth and positive denominators.
struct MixBatch {
    const double* gamma;
    const double* depth;
    const double* rate;
    const double* feed_density;
    const double* feed_conc;
    const double* soil_density;
    const double* soil_conc;
    const double* elem_loss;
    const double* bulk_loss;
};
void mixed_core_conc(const MixBatch& in, double* out, std::size_t n);

namespace detail {
double sum_scalar(const double* x, std::size_t n);
double dot_scalar(const double* x, const double* y, std::size_t n);
void axpy_scalar(double a, const double* x, double* y, std::size_t n);
double sum_sq_diff_scalar(const double* x, const double* y, std::size_t n);
void mixed_core_conc_scalar(const MixBatch& in, double* out, std::size_t n);

#if defined(__x86_64__)
double sum_avx2(const double* x, std::size_t n);
double dot_avx2(const double* x, const double* y, std::size_t n);
void axpy_avx2(double a, const double* x, double* y, std::size_t n);
double sum_sq_diff_avx2(const double* x, const double* y, std::size_t n);
void mixed_core_conc_avx2(const MixBatch& in, double* out, std::size_t n);
#endif
} // namespace detail

} // namespace erw::kernels
