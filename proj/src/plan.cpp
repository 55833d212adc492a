#include "erw/plan.hpp"

#include <cmath>
#include <stdexcept>

namespace erw {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

const char* to_string(Group g) { return g == Group::treatment ? "treatment" : "control"; }

Group group_from_string(const std::string& s) {
    if (s == "treatment") return Group::treatment;
    if (s == "control") return Group::control;
    throw std::invalid_argument("unknown group: " + s);
}

void Stencil::validate() const {
    if (kind == Kind::single) {
        if (n_cores != 1) throw std::invalid_argument("stencil: single requires n_cores = 1");
    } else {
        if (n_cores < 1) throw std::invalid_argument("stencil: n_cores must be >= 1");
        if (!(radius > 0.0)) throw std::invalid_argument("stencil: circle radius must be > 0");
    }
}

void DepthDistribution::validate() const {
    if (kind == Kind::constant) {
        if (!(lo > 0.0)) throw std::invalid_argument("depth: constant depth must be > 0");
        return;
    }
    if (!(lo > 0.0 && hi > lo))
        throw std::invalid_argument("depth: need 0 < lo < hi");
}

double DepthDistribution::sample(RngStream& rng) const {
    switch (kind) {
        case Kind::constant: return lo;
        case Kind::uniform: return rng.uniform(lo, hi);
        case Kind::triangular: return rng.triangular(lo, hi);
    }
    return lo;
}

bool DepthDistribution::contains(double depth) const {
    if (kind == Kind::constant) return depth == lo;
    return depth >= lo && depth <= hi;
}

double Plan::treatment_area() const {
    double a = 0.0;
    for (const Cell& c : cells)
        if (c.group == Group::treatment) a += (c.x1 - c.x0) * (c.y1 - c.y0);
    return a;
}

Plan build_grid_plan(double extent_x, double extent_y, int nx, int ny,
                     const std::vector<Round>& rounds, const Stencil& stencil,
                     double sigma_sample, double sigma_core, const DepthDistribution& depth,
                     RngStream& rng, double core_area) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("grid plan: nx and ny must be >= 1");
    if (!(extent_x > 0.0 && extent_y > 0.0))
        throw std::invalid_argument("grid plan: extent must be positive (zero-area cells)");
    if (rounds.empty()) throw std::invalid_argument("grid plan: need at least one round");
    if (!(sigma_sample >= 0.0 && sigma_core >= 0.0))
        throw std::invalid_argument("grid plan: location noise must be >= 0");
    if (!(core_area > 0.0)) throw std::invalid_argument("grid plan: core_area must be > 0");
    stencil.validate();
    depth.validate();

    Plan plan;
    plan.extent_x = extent_x;
    plan.extent_y = extent_y;
    plan.nx = nx;
    plan.ny = ny;
    plan.rounds = rounds;
    plan.stencil = stencil;
    plan.sigma_sample = sigma_sample;
    plan.sigma_core = sigma_core;
    plan.depth = depth;
    plan.core_area = core_area;

    const double wx = extent_x / nx;
    const double wy = extent_y / ny;
    plan.cells.reserve(static_cast<std::size_t>(nx) * ny);
    int index = 0;
    for (int col = 0; col < nx; ++col) {
        for (int row = 0; row < ny; ++row) {
            Cell c;
            c.index = index++;
            c.x0 = col * wx;
            c.x1 = (col + 1) * wx;
            c.y0 = row * wy;
            c.y1 = (row + 1) * wy;
            c.group = (col % 2 == 0) ? Group::treatment : Group::control;
            c.target = {rng.uniform(c.x0, c.x1), rng.uniform(c.y0, c.y1)};
            plan.cells.push_back(c);
        }
    }
    return plan;
}

std::vector<CoreDraw> realize_cores(const Plan& plan, RngStream& rng) {
    if (plan.cells.empty() || plan.rounds.empty())
        throw std::invalid_argument("realize_cores: empty plan");
    std::vector<CoreDraw> cores;
    cores.reserve(plan.n_cores());
    const int nc = plan.stencil.n_cores;
    for (std::size_t r = 0; r < plan.rounds.size(); ++r) {
        for (const Cell& cell : plan.cells) {
            Point sample = cell.target;
            sample.x += rng.normal(0.0, plan.sigma_sample);
            sample.y += rng.normal(0.0, plan.sigma_sample);
            for (int k = 0; k < nc; ++k) {
                CoreDraw cd;
                cd.cell = cell.index;
                cd.round = static_cast<int>(r) + 1;
                cd.group = cell.group;
                cd.sample_location = sample;
                Point p = sample;
                if (plan.stencil.kind == Stencil::Kind::circle) {
                    const double ang = 2.0 * kPi * k / nc;
                    p.x += plan.stencil.radius * std::cos(ang);
                    p.y += plan.stencil.radius * std::sin(ang);
                }
                p.x += rng.normal(0.0, plan.sigma_core);
                p.y += rng.normal(0.0, plan.sigma_core);
                cd.location = p;
                cd.depth = plan.depth.sample(rng);
                cd.out_of_plot =
                    p.x < 0.0 || p.y < 0.0 || p.x > plan.extent_x || p.y > plan.extent_y;
                cores.push_back(cd);
            }
        }
    }
    return cores;
}

CompositeSample to_sample(const CoreComposition& core) {
    return CompositeSample{core.total_mass, core.conc};
}

CompositeSample composite(std::span<const CompositeSample> parts) {
    if (parts.empty()) throw std::invalid_argument("composite: empty core list");
    const std::size_t k = parts.front().conc.size();
    CompositeSample out;
    out.conc.assign(k, 0.0);
    for (const CompositeSample& p : parts) {
        if (p.conc.size() != k)
            throw std::invalid_argument("composite: mismatched element sets");
        out.mass += p.mass;
        for (std::size_t e = 0; e < k; ++e) out.conc[e] += p.mass * p.conc[e];
    }
    if (!(out.mass > 0.0)) throw std::invalid_argument("composite: total mass must be positive");
    for (double& c : out.conc) c /= out.mass;
    return out;
}

} // namespace erw
