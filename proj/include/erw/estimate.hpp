#pragma once

#include "erw/simulate.hpp"

#include <functional>
#include <vector>

namespace erw {

// Per-cell paired differencing table: the exchangeable resampling unit for
// the bootstrap. One row per cell with the round-2 minus round-3
// concentration difference for each cation.
struct CellDiff {
    int cell = 0;
    Group group = Group::control;
    std::vector<double> diff; // (C2 - C3) per element
};

struct CellTable {
    std::vector<std::string> elements;
    std::vector<CellDiff> treatment;
    std::vector<CellDiff> control;
    double treatment_area = 0.0;
    double stock_per_area = 0.0; // rho_s * depth used for stock conversion, kg/m^2
};

struct StockOptions {
    // nominal conversion values; use_measured replaces rho_s * depth with
    // the dataset's mean composite mass / (n_cores * core_area)
    double soil_density = 1000.0;
    double depth = 0.10;
    bool use_measured = false;
};

CellTable build_cell_table(const Dataset& ds, const Scenario& scenario, const StockOptions& opts);

struct IntervalEstimate {
    double level = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

struct Estimate {
    double point = 0.0;                  // total CDR, t CO2
    std::vector<double> cation_delta;    // mean concentration deltas per element
    std::vector<IntervalEstimate> intervals;
    int replicates = 0;
    bool point_outside_intervals = false; // documented percentile pathology flag
};

// Treatment-minus-control differencing estimator:
//   delta_j = mean_T(C2 - C3)_j - mean_C(C2 - C3)_j
//   loss mass per area = delta_j * rho_s * depth
//   total = cdr_from_losses(per-area losses) * treatment area
Estimate cation_stock_estimate(const CellTable& table);
Estimate cation_stock_estimate(const Dataset& ds, const Scenario& scenario,
                               const StockOptions& opts = {});

using TableEstimator = std::function<double(const CellTable&)>;

// Nonparametric bootstrap: cells resampled with replacement within each
// group stratum, rounds stay paired through the per-cell differences.
// Percentile intervals at the requested levels.
Estimate bootstrap(const CellTable& table, const TableEstimator& estimator, int replicates,
                   const std::vector<double>& levels, RngStream& rng);

struct CoverageLevel {
    double nominal = 0.0;
    double empirical = 0.0;
    int n = 0;
};

struct CoverageReport {
    std::vector<CoverageLevel> levels;
    int n_realizations = 0;
    double mean_point = 0.0;
    double mean_truth = 0.0;
    double mean_bias = 0.0;     // mean(point - truth)
    double rel_bias = 0.0;      // mean_bias / mean_truth
    double point_sd = 0.0;
};

// simulate -> estimate -> bootstrap per realization; empirical coverage of
// each level's interval against that realization's true total CDR
CoverageReport validate_coverage(const Scenario& scenario, int n_realizations, int replicates,
                                 const std::vector<double>& levels, std::uint64_t seed,
                                 const StockOptions& opts = {}, int threads = 1);

} // namespace erw
