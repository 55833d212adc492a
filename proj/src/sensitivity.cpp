#include "erw/sensitivity.hpp"

#include "erw/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace erw {

namespace {

struct ParamAccess {
    const char* name;
    double lo, hi; // domain of the parameter itself
    double* (*field)(MixingParams&, std::size_t element);
};

constexpr double kInf = 1e300;

const ParamAccess kParams[] = {
    {"gamma", 0.0, 1.0, [](MixingParams& p, std::size_t) { return &p.sampled_feedstock_fraction; }},
    {"depth", 0.0, kInf, [](MixingParams& p, std::size_t) { return &p.depth; }},
    {"Q", 0.0, kInf, [](MixingParams& p, std::size_t) { return &p.application_rate; }},
    {"rho_f", 0.0, kInf, [](MixingParams& p, std::size_t) { return &p.feedstock_density; }},
    {"c_f", 0.0, 1.0, [](MixingParams& p, std::size_t e) { return &p.feedstock_conc[e]; }},
    {"rho_s", 0.0, kInf, [](MixingParams& p, std::size_t) { return &p.soil_density; }},
    {"c_s", 0.0, 1.0, [](MixingParams& p, std::size_t e) { return &p.soil_conc[e]; }},
    {"l", 0.0, 1.0, [](MixingParams& p, std::size_t e) { return &p.element_loss[e]; }},
    {"L", 0.0, 1.0, [](MixingParams& p, std::size_t) { return &p.bulk_loss; }},
};

double eval_conc(const MixingParams& p, std::size_t element) {
    return core_composition(p).conc[element];
}

// derivative * h from a central (or boundary-limited one-sided) difference
double difference(const MixingParams& base, const ParamAccess& par, std::size_t element, double h,
                  bool& adjusted) {
    MixingParams up = base;
    MixingParams dn = base;
    const double v = *par.field(up, element);
    double hu = std::min(h, par.hi - v);
    double hd = std::min(h, v - par.lo);
    if (hu < h || hd < h) adjusted = true;
    if (hu <= 0.0 && hd <= 0.0) return 0.0;
    if (hu <= 0.0 || hd <= 0.0) {
        // one-sided at a domain boundary
        const double step = std::max(hu, hd);
        MixingParams& side = hu > 0.0 ? up : dn;
        *par.field(side, element) = v + (hu > 0.0 ? step : -step);
        const double c0 = eval_conc(base, element);
        const double c1 = eval_conc(side, element);
        return (hu > 0.0 ? (c1 - c0) : (c0 - c1)) / step * h;
    }
    const double step = std::min(hu, hd);
    *par.field(up, element) = v + step;
    *par.field(dn, element) = v - step;
    return (eval_conc(up, element) - eval_conc(dn, element)) / (2.0 * step) * h;
}

} // namespace

std::vector<SensitivityEntry> local_sensitivity(const MixingParams& p, double rel_perturbation,
                                                std::size_t element) {
    if (!(rel_perturbation > 0.0))
        throw std::invalid_argument("local_sensitivity: perturbation must be > 0");
    p.validate();
    if (element >= p.elements.size())
        throw std::invalid_argument("local_sensitivity: element index out of range");

    std::vector<SensitivityEntry> out;
    out.reserve(std::size(kParams));
    for (const ParamAccess& par : kParams) {
        SensitivityEntry e;
        e.name = par.name;
        MixingParams probe = p;
        const double v = *par.field(probe, element);
        const double h = rel_perturbation * std::fabs(v);
        if (h == 0.0) {
            out.push_back(e); // relative step of a zero value is exactly zero
            continue;
        }
        bool adjusted = false;
        const double d_full = difference(p, par, element, h, adjusted);
        const double d_half = difference(p, par, element, 0.5 * h, adjusted);
        e.delta_ppm = d_full * 1e6;
        e.step_adjusted = adjusted;
        const double scale = std::max({std::fabs(d_full), std::fabs(2.0 * d_half), 1e-12});
        e.richardson_ok = std::fabs(d_full - 2.0 * d_half) <= 0.05 * scale;
        out.push_back(e);
    }
    return out;
}

MixingParams reference_sensitivity_params() {
    MixingParams p;
    p.elements = {"Ca"};
    p.sampled_feedstock_fraction = 0.9;
    p.depth = 0.10;
    p.application_rate = 3.0;
    p.feedstock_density = 3000.0;
    p.feedstock_conc = {0.05};
    p.soil_density = 1000.0;
    p.soil_conc = {0.003};
    p.element_loss = {0.5};
    p.bulk_loss = 0.5;
    return p;
}

namespace {

void validate_ranges(const std::vector<ParamRange>& ranges) {
    if (ranges.empty()) throw std::invalid_argument("sobol: no parameter ranges");
    for (const ParamRange& r : ranges) {
        if (!(r.lo < r.hi))
            throw std::invalid_argument("sobol: degenerate range for parameter " + r.name);
    }
}

std::vector<std::vector<double>> sample_matrix(const std::vector<ParamRange>& ranges,
                                               std::size_t n, RngStream& rng) {
    const std::size_t k = ranges.size();
    std::vector<std::vector<double>> cols(k, std::vector<double>(n));
    for (std::size_t m = 0; m < n; ++m)
        for (std::size_t i = 0; i < k; ++i) cols[i][m] = rng.uniform(ranges[i].lo, ranges[i].hi);
    return cols;
}

struct Evaluations {
    std::vector<double> fa, fb;
    std::vector<std::vector<double>> fab, fba;
};

struct Indices {
    std::vector<double> s1;
    Matrix s2;
    double variance = 0.0;
};

// estimators over a row subset (identity for the point estimate,
// bootstrap-resampled rows for the standard errors)
Indices compute_indices(const Evaluations& ev, const std::vector<std::size_t>* rows) {
    const std::size_t k = ev.fab.size();
    const std::size_t n = rows ? rows->size() : ev.fa.size();
    auto pick = [&](const std::vector<double>& v, std::size_t m) {
        return rows ? v[(*rows)[m]] : v[m];
    };

    double mean = 0.0;
    for (std::size_t m = 0; m < n; ++m) mean += pick(ev.fa, m) + pick(ev.fb, m);
    mean /= static_cast<double>(2 * n);
    double var = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        const double da = pick(ev.fa, m) - mean;
        const double db = pick(ev.fb, m) - mean;
        var += da * da + db * db;
    }
    var /= static_cast<double>(2 * n - 1);

    double f0sq = 0.0;
    for (std::size_t m = 0; m < n; ++m) f0sq += pick(ev.fa, m) * pick(ev.fb, m);
    f0sq /= static_cast<double>(n);

    Indices out;
    out.variance = var;
    out.s1.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        double vi = 0.0;
        for (std::size_t m = 0; m < n; ++m)
            vi += pick(ev.fb, m) * (pick(ev.fab[i], m) - pick(ev.fa, m));
        out.s1[i] = vi / static_cast<double>(n) / var;
    }
    out.s2 = Matrix(k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            double vij = 0.0;
            for (std::size_t m = 0; m < n; ++m) vij += pick(ev.fba[i], m) * pick(ev.fab[j], m);
            vij = vij / static_cast<double>(n) - f0sq;
            const double s2 = vij / var - out.s1[i] - out.s1[j];
            out.s2.at(i, j) = s2;
            out.s2.at(j, i) = s2;
        }
    }
    return out;
}

} // namespace

SobolResult sobol(const std::vector<ParamRange>& ranges, std::size_t n_base, RngStream& rng,
                  const SobolModel& model, int bootstrap_reps) {
    validate_ranges(ranges);
    if (n_base < (1u << 10)) throw std::invalid_argument("sobol: n_base must be >= 2^10");
    const std::size_t k = ranges.size();
    const std::size_t n = n_base;

    RngStream a_rng = rng.derive("sobol/A");
    RngStream b_rng = rng.derive("sobol/B");
    const auto a = sample_matrix(ranges, n, a_rng);
    const auto b = sample_matrix(ranges, n, b_rng);

    Evaluations ev;
    ev.fa.resize(n);
    ev.fb.resize(n);
    model(a, ev.fa);
    model(b, ev.fb);
    ev.fab.assign(k, std::vector<double>(n));
    ev.fba.assign(k, std::vector<double>(n));
    std::vector<std::vector<double>> work = a;
    for (std::size_t i = 0; i < k; ++i) {
        work = a;
        work[i] = b[i];
        model(work, ev.fab[i]);
        work = b;
        work[i] = a[i];
        model(work, ev.fba[i]);
    }

    const Indices point = compute_indices(ev, nullptr);

    SobolResult out;
    out.n_base = n;
    out.variance = point.variance;
    for (const ParamRange& r : ranges) out.names.push_back(r.name);
    out.s1 = point.s1;
    out.s2 = point.s2;
    out.s1_se.assign(k, 0.0);
    out.s2_se = Matrix(k);

    if (bootstrap_reps > 1) {
        RngStream boot_rng = rng.derive("sobol/se");
        std::vector<double> s1_acc(k, 0.0), s1_acc2(k, 0.0);
        Matrix s2_acc(k), s2_acc2(k);
        std::vector<std::size_t> rows(n);
        for (int rep = 0; rep < bootstrap_reps; ++rep) {
            for (std::size_t m = 0; m < n; ++m) rows[m] = boot_rng.uniform_index(n);
            const Indices bi = compute_indices(ev, &rows);
            for (std::size_t i = 0; i < k; ++i) {
                s1_acc[i] += bi.s1[i];
                s1_acc2[i] += bi.s1[i] * bi.s1[i];
                for (std::size_t j = 0; j < k; ++j) {
                    s2_acc.at(i, j) += bi.s2.at(i, j);
                    s2_acc2.at(i, j) += bi.s2.at(i, j) * bi.s2.at(i, j);
                }
            }
        }
        const double nb = bootstrap_reps;
        for (std::size_t i = 0; i < k; ++i) {
            const double m1 = s1_acc[i] / nb;
            out.s1_se[i] = std::sqrt(std::max(0.0, s1_acc2[i] / nb - m1 * m1) * nb / (nb - 1.0));
            for (std::size_t j = 0; j < k; ++j) {
                const double m2 = s2_acc.at(i, j) / nb;
                out.s2_se.at(i, j) = std::sqrt(
                    std::max(0.0, s2_acc2.at(i, j) / nb - m2 * m2) * nb / (nb - 1.0));
            }
        }
    }
    return out;
}

SobolResult sobol_mixing(const MixingGsaSetup& setup, std::size_t n_base, RngStream& rng,
                         int bootstrap_reps) {
    if (setup.ranges.size() != 8)
        throw std::invalid_argument("sobol_mixing: expected the 8 mixing parameter ranges");
    const double cs = setup.pinned_soil_conc;
    SobolModel model = [cs](const std::vector<std::vector<double>>& cols,
                            std::vector<double>& out) {
        const std::size_t n = cols.front().size();
        const std::vector<double> soil_conc(n, cs);
        kernels::MixBatch batch{cols[0].data(), cols[1].data(), cols[2].data(),
                                cols[3].data(), cols[4].data(), cols[5].data(),
                                soil_conc.data(), cols[6].data(), cols[7].data()};
        out.resize(n);
        kernels::mixed_core_conc(batch, out.data(), n);
    };
    return sobol(setup.ranges, n_base, rng, model, bootstrap_reps);
}

} // namespace erw
