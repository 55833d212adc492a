#include "erw/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace erw::mcmc {

namespace {

void run_one_chain(const LogDensity& logp, int dim, const ChainInit& init,
                   std::span<const double> initial_scales, const Options& opts, int chain,
                   const RngStream& stream, Chains& out) {
    RngStream rng = stream.derive_index("chain", static_cast<std::uint64_t>(chain));
    std::vector<double> x = init(chain, rng);
    if (static_cast<int>(x.size()) != dim)
        throw std::invalid_argument("mcmc: chain init has wrong dimension");
    std::vector<double> log_scale(dim);
    for (int i = 0; i < dim; ++i) {
        const double s = i < static_cast<int>(initial_scales.size()) ? initial_scales[i] : 1.0;
        log_scale[i] = std::log(std::max(s, 1e-12));
    }

    double lp = logp(x);
    if (!std::isfinite(lp))
        throw std::runtime_error("mcmc: chain " + std::to_string(chain) +
                                 " started at a point with non-finite log density");

    std::size_t accepted = 0, proposed = 0;
    const int total = opts.warmup + opts.draws;
    for (int sweep = 0; sweep < total; ++sweep) {
        const bool adapting = sweep < opts.warmup;
        for (int i = 0; i < dim; ++i) {
            const double old = x[i];
            x[i] = old + std::exp(log_scale[i]) * rng.normal();
            const double lp_new = logp(x);
            const bool accept = std::isfinite(lp_new) &&
                                (lp_new >= lp || rng.uniform() < std::exp(lp_new - lp));
            if (accept) {
                lp = lp_new;
            } else {
                x[i] = old;
            }
            if (adapting) {
                const double gamma = std::min(0.25, 1.0 / std::sqrt(1.0 + sweep));
                log_scale[i] += gamma * ((accept ? 1.0 : 0.0) - opts.target_accept);
            } else {
                ++proposed;
                if (accept) ++accepted;
            }
        }
        if (!adapting) {
            const int d = sweep - opts.warmup;
            double* dst = out.draws.data() +
                          (static_cast<std::size_t>(chain) * opts.draws + d) * dim;
            std::copy(x.begin(), x.end(), dst);
        }
    }
    out.accept_rate[static_cast<std::size_t>(chain)] =
        proposed ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0;
}

} // namespace

Chains run_chains(const LogDensity& logp, int dim, const ChainInit& init,
                  std::span<const double> initial_scales, const Options& opts,
                  const RngStream& stream) {
    if (opts.chains < 1) throw std::invalid_argument("mcmc: chains must be >= 1");
    if (opts.draws < 2 || opts.warmup < 0) throw std::invalid_argument("mcmc: bad draw counts");

    Chains out;
    out.n_chains = opts.chains;
    out.n_draws = opts.draws;
    out.dim = dim;
    out.draws.assign(static_cast<std::size_t>(opts.chains) * opts.draws * dim, 0.0);
    out.accept_rate.assign(static_cast<std::size_t>(opts.chains), 0.0);

    const int n_threads = std::max(1, std::min(opts.threads, opts.chains));
    if (n_threads == 1) {
        for (int c = 0; c < opts.chains; ++c)
            run_one_chain(logp, dim, init, initial_scales, opts, c, stream, out);
        return out;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&](int first, int step) {
        for (int c = first; c < opts.chains; c += step) {
            try {
                run_one_chain(logp, dim, init, initial_scales, opts, c, stream, out);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker, t, n_threads);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return out;
}

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

} // namespace

double split_r_hat(const std::vector<std::vector<double>>& chains) {
    if (chains.empty()) throw std::invalid_argument("split_r_hat: no chains");
    const std::size_t half = chains.front().size() / 2;
    if (half < 2) throw std::invalid_argument("split_r_hat: chains too short");

    std::vector<std::vector<double>> seq;
    for (const auto& c : chains) {
        seq.emplace_back(c.begin(), c.begin() + half);
        seq.emplace_back(c.begin() + half, c.begin() + 2 * half);
    }
    const double m = static_cast<double>(seq.size());
    const double n = static_cast<double>(half);

    std::vector<double> means(seq.size());
    double w = 0.0;
    for (std::size_t j = 0; j < seq.size(); ++j) {
        means[j] = mean_of(seq[j]);
        double s2 = 0.0;
        for (double x : seq[j]) s2 += (x - means[j]) * (x - means[j]);
        w += s2 / (n - 1.0);
    }
    w /= m;
    const double grand = mean_of(means);
    double b = 0.0;
    for (double mu : means) b += (mu - grand) * (mu - grand);
    b *= n / (m - 1.0);

    if (w <= 0.0) return 1.0; // constant chains
    const double var_plus = (n - 1.0) / n * w + b / n;
    return std::sqrt(var_plus / w);
}

double bulk_ess(const std::vector<std::vector<double>>& chains) {
    if (chains.empty()) throw std::invalid_argument("bulk_ess: no chains");
    const std::size_t n = chains.front().size();
    if (n < 4) throw std::invalid_argument("bulk_ess: chains too short");
    const std::size_t m = chains.size();

    std::vector<double> means(m);
    std::vector<double> vars(m);
    double w = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        means[j] = mean_of(chains[j]);
        double s2 = 0.0;
        for (double x : chains[j]) s2 += (x - means[j]) * (x - means[j]);
        vars[j] = s2 / static_cast<double>(n - 1);
        w += vars[j];
    }
    w /= static_cast<double>(m);
    double grand = 0.0;
    for (double mu : means) grand += mu;
    grand /= static_cast<double>(m);
    double b = 0.0;
    if (m > 1) {
        for (double mu : means) b += (mu - grand) * (mu - grand);
        b *= static_cast<double>(n) / static_cast<double>(m - 1);
    }
    const double var_plus = (static_cast<double>(n) - 1.0) / static_cast<double>(n) * w +
                            (m > 1 ? b / static_cast<double>(n) : 0.0);
    if (var_plus <= 0.0) return static_cast<double>(n * m);

    // combined-chain autocorrelation, Geyer initial monotone positive pairs
    const std::size_t max_lag = std::min<std::size_t>(n - 1, 4000);
    auto acov = [&](std::size_t t) {
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const auto& c = chains[j];
            double cj = 0.0;
            for (std::size_t i = 0; i + t < n; ++i)
                cj += (c[i] - means[j]) * (c[i + t] - means[j]);
            s += cj / static_cast<double>(n);
        }
        return s / static_cast<double>(m);
    };

    // tau = -1 + 2 * sum of adjacent-(even,odd) autocorrelation pairs
    double tau = 0.0;
    double prev_pair = 1e300;
    for (std::size_t t = 0; t <= max_lag; t += 2) {
        const double rho_even = (t == 0) ? 1.0 : 1.0 - (w - acov(t)) / var_plus;
        const double rho_odd = (t + 1 <= max_lag) ? 1.0 - (w - acov(t + 1)) / var_plus : 0.0;
        double pair = rho_even + rho_odd;
        if (pair < 0.0) break;
        pair = std::min(pair, prev_pair); // initial monotone sequence
        prev_pair = pair;
        tau += 2.0 * pair;
    }
    tau -= 1.0;
    if (tau < 1e-8) tau = 1e-8;
    return static_cast<double>(n * m) / tau;
}

Interval hdi(std::vector<double> draws, double mass) {
    if (draws.empty()) throw std::invalid_argument("hdi: no draws");
    if (!(mass > 0.0 && mass <= 1.0)) throw std::invalid_argument("hdi: mass outside (0,1]");
    std::sort(draws.begin(), draws.end());
    const std::size_t n = draws.size();
    std::size_t window = static_cast<std::size_t>(std::ceil(mass * static_cast<double>(n)));
    window = std::clamp<std::size_t>(window, 1, n);
    std::size_t best = 0;
    double best_width = draws[window - 1] - draws[0];
    for (std::size_t i = 1; i + window <= n; ++i) {
        const double width = draws[i + window - 1] - draws[i];
        if (width < best_width) {
            best_width = width;
            best = i;
        }
    }
    return {draws[best], draws[best + window - 1]};
}

} // namespace erw::mcmc
