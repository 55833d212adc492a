#pragma once

#include "erw/rng.hpp"

#include <functional>
#include <span>
#include <vector>

namespace erw::mcmc {

using LogDensity = std::function<double(std::span<const double>)>;
using ChainInit = std::function<std::vector<double>(int chain, RngStream& rng)>;

struct Options {
    int chains = 4;
    int draws = 8000;  // post-warmup draws recorded per chain
    int warmup = 4000; // adaptation sweeps, discarded
    int threads = 1;
    double target_accept = 0.44; // per-coordinate random walk target
};

struct Chains {
    int n_chains = 0;
    int n_draws = 0;
    int dim = 0;
    // draw-major per chain: value(c, d, i) = draws[(c * n_draws + d) * dim + i]
    std::vector<double> draws;
    std::vector<double> accept_rate; // per chain, post-warmup

    double value(int chain, int draw, int i) const {
        return draws[(static_cast<std::size_t>(chain) * n_draws + draw) * dim + i];
    }
};

// Adaptive Metropolis-within-Gibbs: one Gaussian random-walk proposal per
// coordinate per sweep, per-coordinate step sizes adapted during warmup
// (Robbins–Monro on the log scale) and frozen afterwards. Chains draw from
// streams derived as "chain/<c>", so results are identical for any thread
// count and any chain execution order.
Chains run_chains(const LogDensity& logp, int dim, const ChainInit& init,
                  std::span<const double> initial_scales, const Options& opts,
                  const RngStream& stream);

// split-R-hat over one scalar series; chains[c] is that chain's draws
double split_r_hat(const std::vector<std::vector<double>>& chains);

// bulk effective sample size (Geyer initial monotone positive sequence on
// the combined-chain autocorrelation)
double bulk_ess(const std::vector<std::vector<double>>& chains);

// narrowest contiguous interval holding `mass` of the pooled draws
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};
Interval hdi(std::vector<double> draws, double mass);

} // namespace erw::mcmc
