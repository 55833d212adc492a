// AVX2+FMA kernel variants. Compiled with -mavx2 -mfma; only dispatched to
// when cpuid reports both features.

#if defined(__x86_64__)

#include "erw/kernels.hpp"

#include <immintrin.h>

namespace erw::kernels::detail {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

} // namespace

double sum_avx2(const double* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
    }
    for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += x[i];
    return acc;
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    __m256d acc3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
        acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 8), _mm256_loadu_pd(y + i + 8), acc2);
        acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 12), _mm256_loadu_pd(y + i + 12), acc3);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    double acc = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
    for (; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

double sum_sq_diff_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4));
        acc0 = _mm256_fmadd_pd(d0, d0, acc0);
        acc1 = _mm256_fmadd_pd(d1, d1, acc1);
    }
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        acc0 = _mm256_fmadd_pd(d, d, acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        const double d = x[i] - y[i];
        acc += d * d;
    }
    return acc;
}

void mixed_core_conc_avx2(const MixBatch& in, double* out, std::size_t n) {
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d rate = _mm256_loadu_pd(in.rate + i);
        const __m256d qg = _mm256_mul_pd(rate, _mm256_loadu_pd(in.gamma + i));
        const __m256d mf = _mm256_mul_pd(qg, _mm256_sub_pd(one, _mm256_loadu_pd(in.bulk_loss + i)));
        // h = mf / rho_f where mf > 0, else 0 (blend discards any 0/0 lane)
        const __m256d hdiv = _mm256_div_pd(mf, _mm256_loadu_pd(in.feed_density + i));
        const __m256d mask = _mm256_cmp_pd(mf, zero, _CMP_GT_OQ);
        const __m256d h = _mm256_blendv_pd(zero, hdiv, mask);
        const __m256d ms = _mm256_mul_pd(_mm256_loadu_pd(in.soil_density + i),
                                         _mm256_sub_pd(_mm256_loadu_pd(in.depth + i), h));
        const __m256d mfe = _mm256_mul_pd(
            _mm256_mul_pd(qg, _mm256_sub_pd(one, _mm256_loadu_pd(in.elem_loss + i))),
            _mm256_loadu_pd(in.feed_conc + i));
        const __m256d num = _mm256_fmadd_pd(ms, _mm256_loadu_pd(in.soil_conc + i), mfe);
        _mm256_storeu_pd(out + i, _mm256_div_pd(num, _mm256_add_pd(mf, ms)));
    }
    if (i < n) {
        MixBatch tail{in.gamma + i,        in.depth + i,     in.rate + i,
                      in.feed_density + i, in.feed_conc + i, in.soil_density + i,
                      in.soil_conc + i,    in.elem_loss + i, in.bulk_loss + i};
        mixed_core_conc_scalar(tail, out + i, n - i);
    }
}

} // namespace erw::kernels::detail

#endif // __x86_64__
