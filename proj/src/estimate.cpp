#include "erw/estimate.hpp"

#include "erw/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace erw {

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
    const double h = q * static_cast<double>(sorted.size() - 1);
    const std::size_t i = static_cast<std::size_t>(h);
    if (i + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(i);
    return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

} // namespace

CellTable build_cell_table(const Dataset& ds, const Scenario& scenario, const StockOptions& opts) {
    CellTable table;
    table.elements = ds.elements;
    const std::size_t k = ds.elements.size();

    std::map<int, const SampleRow*> round2, round3;
    bool has2 = false, has3 = false;
    double mass_sum = 0.0;
    std::size_t mass_n = 0;
    for (const SampleRow& row : ds.samples) {
        if (row.conc.size() != k)
            throw std::invalid_argument("cation_stock_estimate: ragged concentration columns");
        if (row.round == 2) {
            round2[row.cell] = &row;
            has2 = true;
        } else if (row.round == 3) {
            round3[row.cell] = &row;
            has3 = true;
        }
        mass_sum += row.mass;
        ++mass_n;
    }
    if (!has2 || !has3)
        throw std::invalid_argument("cation_stock_estimate: dataset must contain rounds 2 and 3");

    for (const auto& [cell, r2] : round2) {
        const auto it = round3.find(cell);
        if (it == round3.end())
            throw std::invalid_argument("cation_stock_estimate: cell " + std::to_string(cell) +
                                        " missing from round 3");
        CellDiff d;
        d.cell = cell;
        d.group = r2->group;
        d.diff.resize(k);
        for (std::size_t j = 0; j < k; ++j) d.diff[j] = r2->conc[j] - it->second->conc[j];
        (d.group == Group::treatment ? table.treatment : table.control).push_back(std::move(d));
    }
    if (table.treatment.empty() || table.control.empty())
        throw std::invalid_argument("cation_stock_estimate: need both treatment and control groups");

    table.treatment_area = ds.truth.treatment_area > 0.0
                               ? ds.truth.treatment_area
                               : scenario.plan.extent_x * scenario.plan.extent_y / 2.0;
    if (opts.use_measured) {
        const double n_cores = static_cast<double>(scenario.plan.stencil.n_cores);
        table.stock_per_area = mass_sum / static_cast<double>(mass_n) /
                               (n_cores * scenario.plan.core_area);
    } else {
        table.stock_per_area = opts.soil_density * opts.depth;
    }
    return table;
}

Estimate cation_stock_estimate(const CellTable& table) {
    const std::size_t k = table.elements.size();
    const auto& coeffs = co2_coefficients_standard().per_cation;
    Estimate out;
    out.cation_delta.assign(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        double t_mean = 0.0, c_mean = 0.0;
        for (const CellDiff& d : table.treatment) t_mean += d.diff[j];
        for (const CellDiff& d : table.control) c_mean += d.diff[j];
        t_mean /= static_cast<double>(table.treatment.size());
        c_mean /= static_cast<double>(table.control.size());
        const double delta = t_mean - c_mean;
        out.cation_delta[j] = delta;
        const auto it = coeffs.find(table.elements[j]);
        if (it == coeffs.end())
            throw std::invalid_argument("cation_stock_estimate: no CO2 coefficient for " +
                                        table.elements[j]);
        // negative estimated deltas are kept: they are sampling noise, and
        // clamping them would bias the estimator
        out.point += it->second * delta * table.stock_per_area;
    }
    out.point *= table.treatment_area / 1000.0; // kg -> t
    return out;
}

Estimate cation_stock_estimate(const Dataset& ds, const Scenario& scenario,
                               const StockOptions& opts) {
    return cation_stock_estimate(build_cell_table(ds, scenario, opts));
}

Estimate bootstrap(const CellTable& table, const TableEstimator& estimator, int replicates,
                   const std::vector<double>& levels, RngStream& rng) {
    if (replicates < 200) throw std::invalid_argument("bootstrap: need at least 200 replicates");
    if (table.treatment.size() < 2 || table.control.size() < 2)
        throw std::invalid_argument("bootstrap: every stratum needs at least 2 cells");
    for (double level : levels)
        if (!(level > 0.0 && level < 1.0))
            throw std::invalid_argument("bootstrap: levels must be in (0,1)");

    Estimate out = [&] {
        Estimate base;
        base.point = estimator(table);
        return base;
    }();
    out.replicates = replicates;

    const std::size_t nt = table.treatment.size();
    const std::size_t nc = table.control.size();
    std::vector<double> reps(static_cast<std::size_t>(replicates));
    CellTable resampled = table;
    for (int b = 0; b < replicates; ++b) {
        for (std::size_t i = 0; i < nt; ++i)
            resampled.treatment[i] = table.treatment[rng.uniform_index(nt)];
        for (std::size_t i = 0; i < nc; ++i)
            resampled.control[i] = table.control[rng.uniform_index(nc)];
        reps[static_cast<std::size_t>(b)] = estimator(resampled);
    }
    std::sort(reps.begin(), reps.end());

    std::vector<double> sorted_levels = levels;
    std::sort(sorted_levels.begin(), sorted_levels.end());
    for (double level : sorted_levels) {
        IntervalEstimate iv;
        iv.level = level;
        iv.lo = quantile_sorted(reps, 0.5 * (1.0 - level));
        iv.hi = quantile_sorted(reps, 0.5 * (1.0 + level));
        if (out.point < iv.lo || out.point > iv.hi) out.point_outside_intervals = true;
        out.intervals.push_back(iv);
    }
    return out;
}

CoverageReport validate_coverage(const Scenario& scenario, int n_realizations, int replicates,
                                 const std::vector<double>& levels, std::uint64_t seed,
                                 const StockOptions& opts, int threads) {
    if (n_realizations < 100)
        throw std::invalid_argument("validate_coverage: need at least 100 realizations");
    scenario.validate();

    struct Row {
        double point = 0.0;
        double truth = 0.0;
        std::vector<bool> covered;
    };
    std::vector<Row> rows(static_cast<std::size_t>(n_realizations));

    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&](int first, int step) {
        for (int i = first; i < n_realizations; i += step) {
            try {
                const Dataset ds = simulate(scenario, realization_stream(seed, i), i);
                const CellTable table = build_cell_table(ds, scenario, opts);
                RngStream boot_rng =
                    realization_stream(seed, i).derive("bootstrap");
                const Estimate est = bootstrap(
                    table, [](const CellTable& t) { return cation_stock_estimate(t).point; },
                    replicates, levels, boot_rng);
                Row& row = rows[static_cast<std::size_t>(i)];
                row.point = est.point;
                row.truth = ds.truth.true_cdr.total_t;
                row.covered.reserve(est.intervals.size());
                for (const IntervalEstimate& iv : est.intervals)
                    row.covered.push_back(row.truth >= iv.lo && row.truth <= iv.hi);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::make_exception_ptr(std::runtime_error(
                        "validate_coverage: realization " + std::to_string(i) + " failed"));
                return;
            }
        }
    };
    const int n_threads = std::max(1, std::min(threads, n_realizations));
    if (n_threads == 1) {
        worker(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker, t, n_threads);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);

    std::vector<double> sorted_levels = levels;
    std::sort(sorted_levels.begin(), sorted_levels.end());

    CoverageReport report;
    report.n_realizations = n_realizations;
    report.levels.resize(sorted_levels.size());
    double sum_p = 0.0, sum_t = 0.0, sum_p2 = 0.0;
    for (const Row& row : rows) {
        sum_p += row.point;
        sum_t += row.truth;
        sum_p2 += row.point * row.point;
        for (std::size_t l = 0; l < sorted_levels.size(); ++l)
            if (row.covered[l]) report.levels[l].empirical += 1.0;
    }
    const double n = n_realizations;
    for (std::size_t l = 0; l < sorted_levels.size(); ++l) {
        report.levels[l].nominal = sorted_levels[l];
        report.levels[l].empirical /= n;
        report.levels[l].n = n_realizations;
    }
    report.mean_point = sum_p / n;
    report.mean_truth = sum_t / n;
    report.mean_bias = report.mean_point - report.mean_truth;
    report.rel_bias = report.mean_truth != 0.0 ? report.mean_bias / report.mean_truth : 0.0;
    report.point_sd = std::sqrt(std::max(0.0, sum_p2 / n - report.mean_point * report.mean_point));
    return report;
}

} // namespace erw
