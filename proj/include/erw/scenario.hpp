#pragma once

#include "erw/geostat.hpp"
#include "erw/plan.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace erw {

inline constexpr int kConfigSchemaVersion = 1;

// Vertical mixing profile of feedstock in soil. gamma(depth) = CDF(depth)
// is the fraction of originally applied feedstock captured by a core.
struct MixingProfile {
    enum class Kind { uniform, triangular };
    Kind kind = Kind::uniform;
    double max_depth = 0.05; // m; support is [0, max_depth]

    double cdf(double depth) const;
    void validate() const;
};

struct PlanSpec {
    double extent_x = 80.0, extent_y = 80.0;
    int nx = 8, ny = 8;
    std::vector<Round> rounds;
    Stencil stencil;
    double sigma_sample = 0.75;
    double sigma_core = 0.10;
    DepthDistribution depth;
    double core_area = 0.005;
};

struct FeedstockSpec {
    std::vector<double> mean_conc; // kg/kg per element
    double conc_rel_sd = 0.0;      // per-core relative sd
    double density = 1000.0;       // kg/m^3
    MixingProfile profile;
};

struct ApplicationSpec {
    double mean_rate = 3.5; // kg/m^2, zero on control cells
    Variogram variogram;    // spatial structure of the rate field
};

struct SoilSpec {
    std::vector<double> conc_mean;        // kg/kg per element
    std::vector<Variogram> conc_variogram; // one per element
    double cross_correlation = 0.0;       // shared off-diagonal coefficient
    double density_mean = 1000.0;
    Variogram density_variogram;
};

enum class BulkLossMode { none, cation_weighted };

struct LossSpec {
    std::vector<double> rate_per_yr;            // lambda per element
    BulkLossMode bulk = BulkLossMode::cation_weighted;

    // l_i(t) = 1 - exp(-lambda_i t)
    double element_loss(std::size_t i, double t) const;
};

struct NoiseSpec {
    double conc_rel_sd = 0.0;
    double mass_rel_sd = 0.0;
};

struct Scenario {
    std::vector<std::string> elements; // cation names, e.g. Ca, Mg
    PlanSpec plan;
    FeedstockSpec feedstock;
    ApplicationSpec application;
    SoilSpec soil;
    LossSpec losses;
    NoiseSpec noise;

    void validate() const;
    // bulk feedstock mass loss fraction L(t) under the configured mode
    double bulk_loss(double t) const;

    // the hypothetical 8x8 three-round deployment used in docs and tests
    static Scenario demo();
};

Scenario scenario_from_json(const nlohmann::json& tree);
nlohmann::json scenario_to_json(const Scenario& sc);
Scenario load_scenario(const std::string& path);

} // namespace erw
