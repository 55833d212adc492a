#include "erw/kernels.hpp"

namespace erw::kernels::detail {

double sum_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double sum_sq_diff_scalar(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - y[i];
        acc += d * d;
    }
    return acc;
}

void mixed_core_conc_scalar(const MixBatch& in, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double qg = in.rate[i] * in.gamma[i];
        const double mf = qg * (1.0 - in.bulk_loss[i]);
        const double h = mf > 0.0 ? mf / in.feed_density[i] : 0.0;
        const double ms = in.soil_density[i] * (in.depth[i] - h);
        const double mfe = qg * (1.0 - in.elem_loss[i]) * in.feed_conc[i];
        out[i] = (mfe + ms * in.soil_conc[i]) / (mf + ms);
    }
}

} // namespace erw::kernels::detail
