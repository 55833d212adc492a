#pragma once

#include "erw/scenario.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace erw {

inline constexpr int kDatasetSchemaVersion = 1;
inline constexpr int kTruthSchemaVersion = 1;

struct SampleRow {
    int realization = 0;
    int cell = 0;
    int round = 0;
    Group group = Group::control;
    double x = 0.0, y = 0.0; // realized sample location
    double depth = 0.0;      // mean core depth
    double mass = 0.0;       // measured composite mass, kg
    std::vector<double> conc; // measured kg/kg per element
};

// every latent needed to replay a core's pre-noise composition
struct CoreTruth {
    int cell = 0;
    int round = 0;
    Group group = Group::control;
    double x = 0.0, y = 0.0;
    double depth = 0.0;
    double gamma = 0.0;
    double rate = 0.0;   // realized Q at this core (post-spreading rounds)
    double latent_rate = 0.0; // realized Q field value regardless of round/group
    double soil_density = 0.0;
    std::vector<double> soil_conc;
    std::vector<double> feed_conc;
    bool out_of_plot = false;
};

struct TrueCdr {
    double per_area = 0.0;   // kg CO2 / m^2
    double total_t = 0.0;    // metric tons CO2
    double completion = 0.0; // CDR / CDR_potential
};

struct TruthManifest {
    std::vector<std::string> elements;
    std::vector<double> loss_rate_per_yr;
    std::vector<double> round_time_yr;
    std::vector<bool> round_after_spreading;
    std::vector<std::vector<double>> element_loss_by_round; // [round][element]
    std::vector<double> bulk_loss_by_round;
    double treatment_area = 0.0;
    double core_area = 0.0;
    double feedstock_density = 0.0;
    TrueCdr true_cdr;
    std::vector<CoreTruth> cores;
};

struct Dataset {
    int realization = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> elements;
    std::vector<SampleRow> samples; // cells x rounds rows
    TruthManifest truth;
};

// Full pipeline: plan -> cores -> fields at core locations -> mixing model
// with l_i(t) = 1 - exp(-lambda_i t) -> composites -> measurement noise.
// Deterministic in (scenario, stream); `realization` only labels the rows.
Dataset simulate(const Scenario& scenario, const RngStream& stream, int realization = 0);

// realization k draws from stream.derive("realization/k"); identical output
// for any thread count.
std::vector<Dataset> batch_simulate(const Scenario& scenario, int n_realizations,
                                    std::uint64_t seed, int threads = 1);

// map realization index -> derived stream (shared by simulate/estimate paths)
RngStream realization_stream(std::uint64_t seed, int realization);

// deployment-level truth from realized latents: mean over post-spreading
// treatment cores of Q * sum_j l_j(t) c_f,j k_j, Bayesian coefficient set
TrueCdr true_cdr(const Scenario& scenario, const TruthManifest& truth, double t);

// recompute a sample's pre-noise composite from the truth manifest
std::vector<CompositeSample> replay_composites(const Scenario& scenario,
                                               const TruthManifest& truth);

} // namespace erw
