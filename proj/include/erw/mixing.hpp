#pragma once

#include "erw/rng.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace erw {

// Closed-form soil/feedstock mixing bookkeeping for a single core, the
// tracer mixing algebra, and the cation-to-CO2 conversion. Everything here
// is a pure function; all the stochastic machinery sits on top.

// Relative threshold below which two concentrations are treated as equal
// when they appear in a denominator (catches catastrophic cancellation).
inline constexpr double kDefaultContrastRtol = 1e-9;

// Thrown when feedstock and baseline concentrations carry no mixing signal
// (f == s up to the contrast tolerance).
struct EndMemberContrastError : std::domain_error {
    using std::domain_error::domain_error;
};

// Thrown when the weathered concentration equals baseline (w == s), so the
// mixing fraction in a denominator is zero. Distinct from the f == s case.
struct MixingSignalError : std::domain_error {
    using std::domain_error::domain_error;
};

struct MixingParams {
    std::vector<std::string> elements;

    double sampled_feedstock_fraction = 1.0; // gamma, kg/kg
    double depth = 0.1;                      // m
    double application_rate = 0.0;           // Q, kg/m^2
    double feedstock_density = 1000.0;       // kg/m^3
    std::vector<double> feedstock_conc;      // kg/kg per element
    double soil_density = 1000.0;            // kg/m^3
    std::vector<double> soil_conc;           // kg/kg per element
    std::vector<double> element_loss;        // kg/kg per element
    double bulk_loss = 0.0;                  // L, kg/kg
    double core_area = 0.005;                // m^2

    // throws std::invalid_argument listing the violated field
    void validate() const;
};

struct CoreComposition {
    double mass_per_area = 0.0;           // M, kg/m^2
    double total_mass = 0.0;              // M * a, kg
    std::vector<double> conc;             // kg/kg per element
    double feedstock_mass_per_area = 0.0; // M_f
    double soil_mass_per_area = 0.0;      // M_s
};

// One (feedstock, baseline, weathered) concentration triple.
struct TracerObservation {
    double feedstock = 0.0; // f
    double baseline = 0.0;  // s
    double weathered = 0.0; // w
};

CoreComposition core_composition(const MixingParams& p);

// w = alpha f + (1 - alpha) s
double mixed_concentration(double alpha, double feedstock, double baseline);

// alpha = (w - s) / (f - s); not clamped, out-of-[0,1] values are data
double mixing_fraction(const TracerObservation& o, double contrast_rtol = kDefaultContrastRtol);

struct DissolutionFraction {
    double value = 0.0;
    bool within_unit_interval = true;
};

// d = 1 - (f_t - s_t)/(w_t - s_t) * (w_m - s_m)/(f_m - s_m), returned
// verbatim; the flag marks values outside [0,1].
DissolutionFraction dissolution_fraction(const TracerObservation& tracer,
                                         const TracerObservation& mobile,
                                         double contrast_rtol = kDefaultContrastRtol);

// concentration decrease attributable to dissolution + leaching (positive = loss):
// alpha f_m + (1 - alpha) s_m - w_m
double tracer_difference(double alpha, const TracerObservation& mobile);

// kg CO2 per kg of dissolved cation
struct Co2Coefficients {
    std::map<std::string, double> per_cation;
};
// the published four-cation conversion, default for the frequentist path
const Co2Coefficients& co2_coefficients_standard();
// higher-precision Ca/Mg factors used by the Bayesian model
const Co2Coefficients& co2_coefficients_bayes();

double cdr_from_losses(const std::map<std::string, double>& loss_mass_kg,
                       const Co2Coefficients& coeffs = co2_coefficients_standard());

// Mixing-triangle pathology demo: noisy draws of the mixed tracer/mobile
// concentrations pushed through the dissolution-fraction formula.
struct TriangleScenario {
    double tracer_feedstock = 0.001;  // 1000 ppm
    double tracer_baseline = 0.0002;  // 200 ppm
    double mobile_feedstock = 0.05;   // 5 %
    double mobile_baseline = 0.002;   // 0.2 %
    double mixing_fraction = 0.02;
    double prescribed_loss = 0.5;
};

struct TriangleResult {
    std::vector<double> draws;
    double fraction_out_of_range = 0.0;
    double noise_free_value = 0.0;
    double mixed_tracer = 0.0; // noise-free w_t
    double mixed_mobile = 0.0; // noise-free w_m
};

TriangleResult triangle_pathology_demo(const TriangleScenario& sc, std::size_t n_draws,
                                       double rel_noise, RngStream& rng);

namespace detail {
// raw formula without precondition checks, used by the noisy demo
inline double dissolution_fraction_value(double ft, double st, double wt, double fm, double sm,
                                         double wm) {
    return 1.0 - (ft - st) / (wt - st) * (wm - sm) / (fm - sm);
}
} // namespace detail

} // namespace erw
