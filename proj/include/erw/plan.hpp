#pragma once

#include "erw/geostat.hpp"
#include "erw/mixing.hpp"
#include "erw/rng.hpp"

#include <span>
#include <string>
#include <vector>

namespace erw {

enum class Group { treatment, control };
const char* to_string(Group g);
Group group_from_string(const std::string& s);

struct Round {
    std::string label;
    double time_yr = 0.0;
    bool after_spreading = false;
};

struct Stencil {
    enum class Kind { single, circle };
    Kind kind = Kind::single;
    int n_cores = 1;
    double radius = 0.0; // m, circle only

    void validate() const;
};

struct DepthDistribution {
    enum class Kind { constant, uniform, triangular };
    Kind kind = Kind::triangular;
    double lo = 0.05; // m (the constant value when kind == constant)
    double hi = 0.15;

    void validate() const;
    double sample(RngStream& rng) const;
    bool contains(double depth) const;
};

struct Cell {
    int index = 0;
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0; // axis-aligned bounds
    Group group = Group::control;
    Point target; // one target per cell, shared by every round
};

struct Plan {
    double extent_x = 0.0, extent_y = 0.0; // m
    int nx = 0, ny = 0;
    std::vector<Cell> cells;
    std::vector<Round> rounds;
    Stencil stencil;
    double sigma_sample = 0.0; // m, sample-location error per round
    double sigma_core = 0.0;   // m, per-core placement error
    DepthDistribution depth;
    double core_area = 0.005; // m^2

    std::size_t n_samples() const { return cells.size() * rounds.size(); }
    std::size_t n_cores() const { return n_samples() * static_cast<std::size_t>(stencil.n_cores); }
    double treatment_area() const;
};

struct CoreDraw {
    int cell = 0;
    int round = 0; // 1-based round id
    Group group = Group::control;
    Point location;
    Point sample_location; // realized composite center for this cell/round
    double depth = 0.0;
    bool out_of_plot = false;
};

// nx*ny cells tiling the extent, groups alternating by column parity
// (column 0 = treatment), per-cell targets drawn uniformly within cells.
Plan build_grid_plan(double extent_x, double extent_y, int nx, int ny,
                     const std::vector<Round>& rounds, const Stencil& stencil,
                     double sigma_sample, double sigma_core, const DepthDistribution& depth,
                     RngStream& rng, double core_area = 0.005);

// Fixed draw order: rounds outer, cells inner, stencil cores innermost.
// Cores sit at equal angles starting from 0 on the stencil circle around
// the jittered sample location, each with its own placement jitter.
// Out-of-plot cores are kept and flagged.
std::vector<CoreDraw> realize_cores(const Plan& plan, RngStream& rng);

struct CompositeSample {
    double mass = 0.0; // kg
    std::vector<double> conc;
};

CompositeSample to_sample(const CoreComposition& core);
// mass-weighted concentration average; associative and permutation-invariant
CompositeSample composite(std::span<const CompositeSample> parts);

} // namespace erw
