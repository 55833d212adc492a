#include "erw/kernels.hpp"

#include <stdexcept>

namespace erw::kernels {

namespace {

struct Table {
    double (*sum)(const double*, std::size_t);
    double (*dot)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    double (*sum_sq_diff)(const double*, const double*, std::size_t);
    void (*mixed_core_conc)(const MixBatch&, double*, std::size_t);
};

constexpr Table kScalar{detail::sum_scalar, detail::dot_scalar, detail::axpy_scalar,
                        detail::sum_sq_diff_scalar, detail::mixed_core_conc_scalar};

#if defined(__x86_64__)
constexpr Table kAvx2{detail::sum_avx2, detail::dot_avx2, detail::axpy_avx2,
                      detail::sum_sq_diff_avx2, detail::mixed_core_conc_avx2};

bool cpu_has_avx2_fma() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

Backend detect() {
#if defined(__x86_64__)
    if (cpu_has_avx2_fma()) return Backend::avx2;
#endif
    return Backend::scalar;
}

Backend g_backend = detect();
const Table* g_table = (g_backend == Backend::scalar) ? &kScalar
#if defined(__x86_64__)
                                                      : &kAvx2;
#else
                                                      : &kScalar;
#endif

} // namespace

Backend active_backend() { return g_backend; }

bool backend_supported(Backend b) {
    switch (b) {
        case Backend::scalar: return true;
        case Backend::avx2:
#if defined(__x86_64__)
            return cpu_has_avx2_fma();
#else
            return false;
#endif
    }
    return false;
}

void force_backend(Backend b) {
    if (!backend_supported(b))
        throw std::runtime_error(std::string("kernel backend not supported on this cpu: ") +
                                 backend_name(b));
    g_backend = b;
#if defined(__x86_64__)
    g_table = (b == Backend::avx2) ? &kAvx2 : &kScalar;
#else
    g_table = &kScalar;
#endif
}

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
    }
    return "?";
}

double sum(const double* x, std::size_t n) { return g_table->sum(x, n); }
double dot(const double* x, const double* y, std::size_t n) { return g_table->dot(x, y, n); }
void axpy(double a, const double* x, double* y, std::size_t n) { g_table->axpy(a, x, y, n); }
double sum_sq_diff(const double* x, const double* y, std::size_t n) {
    return g_table->sum_sq_diff(x, y, n);
}
void mixed_core_conc(const MixBatch& in, double* out, std::size_t n) {
    g_table->mixed_core_conc(in, out, n);
}

} // namespace erw::kernels
