#include "erw/mixing.hpp"

#include <cmath>
#include <sstream>

namespace erw {

namespace {

bool in_unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

bool contrast_degenerate(double a, double b, double rtol) {
    const double scale = std::max(std::fabs(a), std::fabs(b));
    return a == b || std::fabs(a - b) <= rtol * scale;
}

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

} // namespace

void MixingParams::validate() const {
    const std::size_t k = elements.size();
    if (k == 0) fail("MixingParams: element set is empty");
    if (feedstock_conc.size() != k || soil_conc.size() != k || element_loss.size() != k)
        fail("MixingParams: feedstock_conc, soil_conc, element_loss must match the element set");
    if (!(sampled_feedstock_fraction >= 0.0 && sampled_feedstock_fraction <= 1.0))
        fail("MixingParams: sampled_feedstock_fraction outside [0,1]");
    if (!(bulk_loss >= 0.0 && bulk_loss <= 1.0)) fail("MixingParams: bulk_loss outside [0,1]");
    if (!(application_rate >= 0.0)) fail("MixingParams: application_rate must be >= 0");
    if (application_rate > 0.0 && !(feedstock_density > 0.0))
        fail("MixingParams: feedstock_density must be > 0 when application_rate > 0");
    if (!(soil_density > 0.0)) fail("MixingParams: soil_density must be > 0");
    if (!(depth > 0.0)) fail("MixingParams: depth must be > 0");
    if (!(core_area > 0.0)) fail("MixingParams: core_area must be > 0");
    for (std::size_t i = 0; i < k; ++i) {
        if (!in_unit_interval(feedstock_conc[i]))
            fail("MixingParams: feedstock_conc[" + elements[i] + "] outside [0,1]");
        if (!in_unit_interval(soil_conc[i]))
            fail("MixingParams: soil_conc[" + elements[i] + "] outside [0,1]");
        if (!in_unit_interval(element_loss[i]))
            fail("MixingParams: element_loss[" + elements[i] + "] outside [0,1]");
    }
}

CoreComposition core_composition(const MixingParams& p) {
    p.validate();
    const double qg = p.application_rate * p.sampled_feedstock_fraction;
    const double mf = qg * (1.0 - p.bulk_loss);
    const double h = mf > 0.0 ? mf / p.feedstock_density : 0.0;
    if (h >= p.depth) {
        std::ostringstream msg;
        msg << "core_composition: feedstock height " << h << " m fills the sampled depth "
            << p.depth << " m";
        throw std::invalid_argument(msg.str());
    }
    const double ms = p.soil_density * (p.depth - h);

    CoreComposition out;
    out.feedstock_mass_per_area = mf;
    out.soil_mass_per_area = ms;
    out.mass_per_area = mf + ms;
    out.total_mass = out.mass_per_area * p.core_area;
    out.conc.resize(p.elements.size());
    for (std::size_t i = 0; i < p.elements.size(); ++i) {
        const double mfe = qg * (1.0 - p.element_loss[i]) * p.feedstock_conc[i];
        const double mse = ms * p.soil_conc[i];
        out.conc[i] = (mfe + mse) / out.mass_per_area;
    }
    return out;
}

double mixed_concentration(double alpha, double feedstock, double baseline) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("mixed_concentration: alpha outside [0,1]");
    return alpha * feedstock + (1.0 - alpha) * baseline;
}

double mixing_fraction(const TracerObservation& o, double contrast_rtol) {
    if (contrast_degenerate(o.feedstock, o.baseline, contrast_rtol))
        throw EndMemberContrastError(
            "mixing_fraction: feedstock and baseline concentrations coincide, tracer carries no "
            "mixing signal");
    return (o.weathered - o.baseline) / (o.feedstock - o.baseline);
}

DissolutionFraction dissolution_fraction(const TracerObservation& tracer,
                                         const TracerObservation& mobile, double contrast_rtol) {
    if (contrast_degenerate(tracer.feedstock, tracer.baseline, contrast_rtol))
        throw EndMemberContrastError("dissolution_fraction: tracer end members coincide (f_t = s_t)");
    if (contrast_degenerate(mobile.feedstock, mobile.baseline, contrast_rtol))
        throw EndMemberContrastError("dissolution_fraction: mobile end members coincide (f_m = s_m)");
    if (contrast_degenerate(tracer.weathered, tracer.baseline, contrast_rtol))
        throw MixingSignalError(
            "dissolution_fraction: weathered tracer equals baseline (w_t = s_t), zero denominator");
    DissolutionFraction out;
    out.value = detail::dissolution_fraction_value(tracer.feedstock, tracer.baseline,
                                                   tracer.weathered, mobile.feedstock,
                                                   mobile.baseline, mobile.weathered);
    out.within_unit_interval = in_unit_interval(out.value);
    return out;
}

double tracer_difference(double alpha, const TracerObservation& mobile) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("tracer_difference: alpha outside [0,1]");
    return alpha * mobile.feedstock + (1.0 - alpha) * mobile.baseline - mobile.weathered;
}

const Co2Coefficients& co2_coefficients_standard() {
    static const Co2Coefficients c{{{"Mg", 3.62}, {"Ca", 2.2}, {"Na", 1.91}, {"K", 1.12}}};
    return c;
}

const Co2Coefficients& co2_coefficients_bayes() {
    static const Co2Coefficients c{{{"Ca", 2.196}, {"Mg", 3.621}}};
    return c;
}

double cdr_from_losses(const std::map<std::string, double>& loss_mass_kg,
                       const Co2Coefficients& coeffs) {
    double co2 = 0.0;
    for (const auto& [cation, mass] : loss_mass_kg) {
        const auto it = coeffs.per_cation.find(cation);
        if (it == coeffs.per_cation.end())
            throw std::invalid_argument("cdr_from_losses: unknown cation " + cation);
        if (!(mass >= 0.0))
            throw std::invalid_argument("cdr_from_losses: negative mass for " + cation);
        co2 += it->second * mass;
    }
    return co2;
}

TriangleResult triangle_pathology_demo(const TriangleScenario& sc, std::size_t n_draws,
                                       double rel_noise, RngStream& rng) {
    if (n_draws == 0) throw std::invalid_argument("triangle_pathology_demo: n_draws must be >= 1");
    if (!(rel_noise >= 0.0))
        throw std::invalid_argument("triangle_pathology_demo: rel_noise must be >= 0");
    if (!(sc.mixing_fraction > 0.0 && sc.mixing_fraction <= 1.0))
        throw std::invalid_argument("triangle_pathology_demo: mixing_fraction outside (0,1]");
    if (!(sc.prescribed_loss >= 0.0 && sc.prescribed_loss <= 1.0))
        throw std::invalid_argument("triangle_pathology_demo: prescribed_loss outside [0,1]");

    TriangleResult out;
    // noise-free mixed concentrations: tracer mixes with alpha, the mobile
    // element with the post-loss alpha_m = alpha * (1 - loss)
    const double alpha_m = sc.mixing_fraction * (1.0 - sc.prescribed_loss);
    out.mixed_tracer =
        mixed_concentration(sc.mixing_fraction, sc.tracer_feedstock, sc.tracer_baseline);
    out.mixed_mobile = mixed_concentration(alpha_m, sc.mobile_feedstock, sc.mobile_baseline);
    out.noise_free_value =
        detail::dissolution_fraction_value(sc.tracer_feedstock, sc.tracer_baseline,
                                           out.mixed_tracer, sc.mobile_feedstock,
                                           sc.mobile_baseline, out.mixed_mobile);

    out.draws.resize(n_draws);
    std::size_t n_out = 0;
    for (std::size_t i = 0; i < n_draws; ++i) {
        const double wt = out.mixed_tracer * (1.0 + rel_noise * rng.normal());
        const double wm = out.mixed_mobile * (1.0 + rel_noise * rng.normal());
        const double d = detail::dissolution_fraction_value(
            sc.tracer_feedstock, sc.tracer_baseline, wt, sc.mobile_feedstock, sc.mobile_baseline,
            wm);
        out.draws[i] = d;
        if (!(d >= 0.0 && d <= 1.0)) ++n_out;
    }
    out.fraction_out_of_range = static_cast<double>(n_out) / static_cast<double>(n_draws);
    return out;
}

} // namespace erw
