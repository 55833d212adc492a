#pragma once

#include "erw/linalg.hpp"
#include "erw/mixing.hpp"
#include "erw/rng.hpp"

#include <functional>
#include <string>
#include <vector>

namespace erw {

// ---- local (finite-difference) sensitivity ----

struct SensitivityEntry {
    std::string name;
    double delta_ppm = 0.0;   // concentration change for a +rel change of the input
    bool step_adjusted = false; // step shrank or went one-sided at a boundary
    bool richardson_ok = true;  // half-step pass agrees
};

// Central differences with step = rel_perturbation * value, cross-checked
// at half step. Perturbs gamma, depth, Q, rho_f, c_f, rho_s, c_s, l, L of
// the given element; reports the concentration change in ppm.
std::vector<SensitivityEntry> local_sensitivity(const MixingParams& p, double rel_perturbation,
                                                std::size_t element);

// the single-core parameter set examined in the worked gradient example
MixingParams reference_sensitivity_params();

// ---- Sobol global sensitivity ----

struct ParamRange {
    std::string name;
    double lo = 0.0;
    double hi = 1.0;
};

// model evaluated on columns of samples: out[m] = f(cols[0][m], ...)
using SobolModel =
    std::function<void(const std::vector<std::vector<double>>& cols, std::vector<double>& out)>;

struct SobolResult {
    std::vector<std::string> names;
    std::size_t n_base = 0;
    double variance = 0.0;
    std::vector<double> s1;
    std::vector<double> s1_se;
    Matrix s2;    // symmetric, zero diagonal
    Matrix s2_se;
};

// Saltelli scheme at cost n_base * (2k + 2): first-order indices from
// f_B (f_ABi - f_A), second-order closed effects from f_BAi * f_ABj cross
// products. Standard errors bootstrap over sample rows.
SobolResult sobol(const std::vector<ParamRange>& ranges, std::size_t n_base, RngStream& rng,
                  const SobolModel& model, int bootstrap_reps = 100);

// mixing-model GSA with the soil concentration pinned (it dwarfs the rest)
struct MixingGsaSetup {
    std::vector<ParamRange> ranges{
        {"gamma", 0.1, 1.0},  {"depth", 0.05, 0.25}, {"Q", 0.0, 5.6},
        {"rho_f", 1000.0, 3000.0}, {"c_f", 0.04, 0.1},   {"rho_s", 500.0, 1500.0},
        {"l", 0.0, 1.0},      {"L", 0.0, 1.0}};
    double pinned_soil_conc = 0.003;
};

SobolResult sobol_mixing(const MixingGsaSetup& setup, std::size_t n_base, RngStream& rng,
                         int bootstrap_reps = 100);

} // namespace erw
