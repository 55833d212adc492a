#include "erw/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace erw {

namespace {

MixingParams core_params(const Scenario& sc, const CoreTruth& core,
                         const std::vector<double>& elem_loss, double bulk_loss) {
    MixingParams p;
    p.elements = sc.elements;
    p.sampled_feedstock_fraction = core.gamma;
    p.depth = core.depth;
    p.application_rate = core.rate;
    p.feedstock_density = sc.feedstock.density;
    p.feedstock_conc = core.feed_conc;
    p.soil_density = core.soil_density;
    p.soil_conc = core.soil_conc;
    p.element_loss = elem_loss;
    p.bulk_loss = bulk_loss;
    p.core_area = sc.plan.core_area;
    return p;
}

} // namespace

RngStream realization_stream(std::uint64_t seed, int realization) {
    return RngStream::from_seed(seed).derive_index("realization",
                                                   static_cast<std::uint64_t>(realization));
}

Dataset simulate(const Scenario& scenario, const RngStream& stream, int realization) {
    scenario.validate();
    const std::size_t k = scenario.elements.size();

    RngStream plan_rng = stream.derive("plan");
    const Plan plan = build_grid_plan(scenario.plan.extent_x, scenario.plan.extent_y,
                                      scenario.plan.nx, scenario.plan.ny, scenario.plan.rounds,
                                      scenario.plan.stencil, scenario.plan.sigma_sample,
                                      scenario.plan.sigma_core, scenario.plan.depth, plan_rng,
                                      scenario.plan.core_area);

    RngStream core_rng = stream.derive("cores");
    const std::vector<CoreDraw> draws = realize_cores(plan, core_rng);
    const std::size_t n_cores = draws.size();

    std::vector<Point> locations(n_cores);
    for (std::size_t i = 0; i < n_cores; ++i) locations[i] = draws[i].location;

    // spatial fields realized jointly at every core location
    RngStream app_rng = stream.derive("field/application");
    std::vector<double> rate_field =
        realize_field(locations, FieldSpec{scenario.application.mean_rate,
                                           scenario.application.variogram},
                      app_rng);
    std::size_t clamped = 0;
    for (double& q : rate_field)
        if (q < 0.0) {
            q = 0.0;
            ++clamped;
        }
    (void)clamped; // essentially impossible with sane variograms

    RngStream soil_rng = stream.derive("field/soil");
    std::vector<FieldSpec> soil_specs(k);
    for (std::size_t j = 0; j < k; ++j)
        soil_specs[j] = FieldSpec{scenario.soil.conc_mean[j], scenario.soil.conc_variogram[j]};
    const Matrix rho = cross_correlation_matrix(k, scenario.soil.cross_correlation);
    const std::vector<std::vector<double>> soil_conc =
        realize_cross_correlated(locations, soil_specs, rho, soil_rng);

    RngStream dens_rng = stream.derive("field/density");
    const std::vector<double> density_field =
        realize_field(locations, FieldSpec{scenario.soil.density_mean,
                                           scenario.soil.density_variogram},
                      dens_rng);

    RngStream feed_rng = stream.derive("feedstock");

    // per-round prescribed losses
    const std::size_t n_rounds = scenario.plan.rounds.size();
    std::vector<std::vector<double>> loss_by_round(n_rounds, std::vector<double>(k, 0.0));
    std::vector<double> bulk_by_round(n_rounds, 0.0);
    for (std::size_t r = 0; r < n_rounds; ++r) {
        const Round& round = scenario.plan.rounds[r];
        if (!round.after_spreading) continue;
        for (std::size_t j = 0; j < k; ++j)
            loss_by_round[r][j] = scenario.losses.element_loss(j, round.time_yr);
        bulk_by_round[r] = scenario.bulk_loss(round.time_yr);
    }

    Dataset ds;
    ds.realization = realization;
    ds.elements = scenario.elements;
    ds.truth.elements = scenario.elements;
    ds.truth.loss_rate_per_yr = scenario.losses.rate_per_yr;
    ds.truth.element_loss_by_round = loss_by_round;
    ds.truth.bulk_loss_by_round = bulk_by_round;
    ds.truth.treatment_area = plan.treatment_area();
    ds.truth.core_area = plan.core_area;
    ds.truth.feedstock_density = scenario.feedstock.density;
    for (const Round& r : scenario.plan.rounds) {
        ds.truth.round_time_yr.push_back(r.time_yr);
        ds.truth.round_after_spreading.push_back(r.after_spreading);
    }
    ds.truth.cores.resize(n_cores);

    for (std::size_t i = 0; i < n_cores; ++i) {
        const CoreDraw& d = draws[i];
        CoreTruth& ct = ds.truth.cores[i];
        ct.cell = d.cell;
        ct.round = d.round;
        ct.group = d.group;
        ct.x = d.location.x;
        ct.y = d.location.y;
        ct.depth = d.depth;
        ct.out_of_plot = d.out_of_plot;
        ct.gamma = scenario.feedstock.profile.cdf(d.depth);
        ct.latent_rate = rate_field[i];
        const bool spread = scenario.plan.rounds[d.round - 1].after_spreading &&
                            d.group == Group::treatment;
        ct.rate = spread ? rate_field[i] : 0.0;
        ct.soil_density = density_field[i];
        ct.soil_conc.resize(k);
        for (std::size_t j = 0; j < k; ++j) ct.soil_conc[j] = soil_conc[j][i];
        ct.feed_conc.resize(k);
        for (std::size_t j = 0; j < k; ++j) {
            const double mean = scenario.feedstock.mean_conc[j];
            ct.feed_conc[j] = mean * (1.0 + scenario.feedstock.conc_rel_sd * feed_rng.normal());
            if (ct.feed_conc[j] < 0.0) ct.feed_conc[j] = 0.0;
        }
    }

    // mixing model per core, composite per (round, cell)
    const std::vector<CompositeSample> composites = replay_composites(scenario, ds.truth);

    // measurement noise, applied after compositing
    RngStream conc_noise_rng = stream.derive("noise/conc");
    RngStream mass_noise_rng = stream.derive("noise/mass");
    const int nc = plan.stencil.n_cores;
    ds.samples.resize(composites.size());
    for (std::size_t s = 0; s < composites.size(); ++s) {
        const CoreDraw& first = draws[s * nc];
        SampleRow row;
        row.realization = realization;
        row.cell = first.cell;
        row.round = first.round;
        row.group = first.group;
        row.x = first.sample_location.x;
        row.y = first.sample_location.y;
        double depth_sum = 0.0;
        for (int c = 0; c < nc; ++c) depth_sum += draws[s * nc + c].depth;
        row.depth = depth_sum / nc;
        row.conc.resize(k);
        for (std::size_t j = 0; j < k; ++j) {
            const double f =
                std::max(1.0 + scenario.noise.conc_rel_sd * conc_noise_rng.normal(), 0.01);
            row.conc[j] = composites[s].conc[j] * f;
        }
        const double fm = std::max(1.0 + scenario.noise.mass_rel_sd * mass_noise_rng.normal(), 0.01);
        row.mass = composites[s].mass * fm;
        ds.samples[s] = std::move(row);
    }

    ds.truth.true_cdr = true_cdr(scenario, ds.truth, scenario.plan.rounds.back().time_yr);
    return ds;
}

std::vector<CompositeSample> replay_composites(const Scenario& scenario,
                                               const TruthManifest& truth) {
    const std::size_t nc = truth.cores.size();
    const int stencil_cores = scenario.plan.stencil.n_cores;
    if (nc == 0 || nc % static_cast<std::size_t>(stencil_cores) != 0)
        throw std::invalid_argument("replay_composites: core count does not match the stencil");
    const std::size_t n_samples = nc / stencil_cores;
    std::vector<CompositeSample> out(n_samples);
    std::vector<CompositeSample> parts(stencil_cores);
    for (std::size_t s = 0; s < n_samples; ++s) {
        for (int c = 0; c < stencil_cores; ++c) {
            const CoreTruth& core = truth.cores[s * stencil_cores + c];
            const std::size_t r = static_cast<std::size_t>(core.round) - 1;
            try {
                parts[c] = to_sample(core_composition(
                    core_params(scenario, core, truth.element_loss_by_round[r],
                                truth.bulk_loss_by_round[r])));
            } catch (const std::exception& e) {
                std::ostringstream msg;
                msg << "simulate: mixing model rejected core (cell " << core.cell << ", round "
                    << core.round << "): " << e.what();
                throw std::runtime_error(msg.str());
            }
        }
        out[s] = composite(parts);
    }
    return out;
}

TrueCdr true_cdr(const Scenario& scenario, const TruthManifest& truth, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("true_cdr: t must be >= 0");
    const auto& coeffs = co2_coefficients_bayes().per_cation;
    std::vector<double> factor(scenario.elements.size());
    for (std::size_t j = 0; j < scenario.elements.size(); ++j) {
        const auto it = coeffs.find(scenario.elements[j]);
        if (it == coeffs.end())
            throw std::invalid_argument("true_cdr: no CO2 coefficient for " + scenario.elements[j]);
        factor[j] = it->second;
    }

    double cdr = 0.0, potential = 0.0;
    std::size_t n = 0;
    for (const CoreTruth& core : truth.cores) {
        const std::size_t r = static_cast<std::size_t>(core.round) - 1;
        if (core.group != Group::treatment || !truth.round_after_spreading[r]) continue;
        double c = 0.0, p = 0.0;
        for (std::size_t j = 0; j < factor.size(); ++j) {
            const double loss_t = scenario.losses.element_loss(j, t);
            c += loss_t * core.feed_conc[j] * factor[j];
            p += core.feed_conc[j] * factor[j];
        }
        cdr += core.latent_rate * c;
        potential += core.latent_rate * p;
        ++n;
    }
    TrueCdr out;
    if (n == 0) return out;
    out.per_area = cdr / static_cast<double>(n);
    const double potential_per_area = potential / static_cast<double>(n);
    out.total_t = out.per_area * truth.treatment_area / 1000.0;
    out.completion = potential_per_area > 0.0 ? out.per_area / potential_per_area : 0.0;
    return out;
}

std::vector<Dataset> batch_simulate(const Scenario& scenario, int n_realizations,
                                    std::uint64_t seed, int threads) {
    if (n_realizations < 1)
        throw std::invalid_argument("batch_simulate: n_realizations must be >= 1");
    scenario.validate();
    std::vector<Dataset> out(static_cast<std::size_t>(n_realizations));
    const int n_threads = std::max(1, std::min(threads, n_realizations));

    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&](int first, int step) {
        for (int i = first; i < n_realizations; i += step) {
            try {
                out[static_cast<std::size_t>(i)] = simulate(scenario, realization_stream(seed, i), i);
                out[static_cast<std::size_t>(i)].seed = seed;
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };

    if (n_threads == 1) {
        worker(0, 1);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker, t, n_threads);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);
    return out;
}

} // namespace erw
