#include "erw/scenario.hpp"

#include "erw/keytree.hpp"

#include <cmath>
#include <stdexcept>

namespace erw {

using nlohmann::json;

double MixingProfile::cdf(double depth) const {
    if (depth <= 0.0) return 0.0;
    const double x = std::min(depth / max_depth, 1.0);
    switch (kind) {
        case Kind::uniform: return x;
        case Kind::triangular:
            // density decreasing linearly from the surface to max_depth
            return x * (2.0 - x);
    }
    return x;
}

void MixingProfile::validate() const {
    if (!(max_depth > 0.0)) throw std::invalid_argument("mixing profile: max_depth must be > 0");
}

double LossSpec::element_loss(std::size_t i, double t) const {
    return 1.0 - std::exp(-rate_per_yr.at(i) * t);
}

double Scenario::bulk_loss(double t) const {
    if (losses.bulk == BulkLossMode::none) return 0.0;
    double l = 0.0;
    for (std::size_t j = 0; j < elements.size(); ++j)
        l += feedstock.mean_conc[j] * losses.element_loss(j, t);
    return l;
}

void Scenario::validate() const {
    const std::size_t k = elements.size();
    if (k == 0) throw std::invalid_argument("scenario: element list is empty");
    if (feedstock.mean_conc.size() != k)
        throw std::invalid_argument("scenario: feedstock.conc must match the element list");
    if (soil.conc_mean.size() != k)
        throw std::invalid_argument("scenario: soil.conc_mean must match the element list");
    if (soil.conc_variogram.size() != k)
        throw std::invalid_argument("scenario: soil.conc_variogram must match the element list");
    if (losses.rate_per_yr.size() != k)
        throw std::invalid_argument("scenario: losses.rate_per_yr must match the element list");
    for (double r : losses.rate_per_yr)
        if (!(r >= 0.0)) throw std::invalid_argument("scenario: loss rates must be >= 0");
    if (!(noise.conc_rel_sd >= 0.0 && noise.mass_rel_sd >= 0.0))
        throw std::invalid_argument("scenario: noise sds must be >= 0");
    if (!(feedstock.conc_rel_sd >= 0.0))
        throw std::invalid_argument("scenario: feedstock.conc_rel_sd must be >= 0");
    if (!(feedstock.density > 0.0))
        throw std::invalid_argument("scenario: feedstock.density must be > 0");
    if (!(application.mean_rate >= 0.0))
        throw std::invalid_argument("scenario: application.mean_rate must be >= 0");
    if (!(std::fabs(soil.cross_correlation) <= 1.0))
        throw std::invalid_argument("scenario: cross_correlation outside [-1,1]");
    feedstock.profile.validate();
    application.variogram.validate();
    for (const auto& v : soil.conc_variogram) v.validate();
    soil.density_variogram.validate();
    if (plan.rounds.empty()) throw std::invalid_argument("scenario: plan has no rounds");
    plan.stencil.validate();
    plan.depth.validate();
}

Scenario Scenario::demo() {
    Scenario sc;
    sc.elements = {"Ca", "Mg"};

    sc.plan.extent_x = 80.0;
    sc.plan.extent_y = 80.0;
    sc.plan.nx = 8;
    sc.plan.ny = 8;
    sc.plan.rounds = {{"baseline", 0.0, false},
                      {"postspread", 0.0, true},
                      {"weathered", 1.0, true}};
    sc.plan.stencil = {Stencil::Kind::circle, 5, 2.0};
    sc.plan.sigma_sample = 0.75;
    sc.plan.sigma_core = 0.10;
    sc.plan.depth = {DepthDistribution::Kind::triangular, 0.05, 0.15};
    sc.plan.core_area = 0.005;

    sc.feedstock.mean_conc = {0.07, 0.05};
    sc.feedstock.conc_rel_sd = 0.03;
    sc.feedstock.density = 1000.0;
    sc.feedstock.profile = {MixingProfile::Kind::uniform, 0.05};

    sc.application.mean_rate = 3.5;
    // placeholder spatial structure: smooth streaks along 30 degrees
    sc.application.variogram = {VariogramModel::gaussian, 0.0025, 0.09, 25.0,
                                make_anisotropy(30.0, 0.25)};

    sc.soil.conc_mean = {0.002, 0.001};
    sc.soil.conc_variogram = {
        {VariogramModel::exponential, 9e-9, 9e-8, 18.0, {1, 0, 0, 1}},
        {VariogramModel::exponential, 2.25e-9, 2.25e-8, 18.0, {1, 0, 0, 1}}};
    sc.soil.cross_correlation = 0.75;
    sc.soil.density_mean = 1000.0;
    sc.soil.density_variogram = {VariogramModel::spherical, 1000.0, 9000.0, 20.0, {1, 0, 0, 1}};

    sc.losses.rate_per_yr = {0.4, 0.8};
    sc.losses.bulk = BulkLossMode::cation_weighted;

    sc.noise.conc_rel_sd = 0.03;
    sc.noise.mass_rel_sd = 0.005;
    return sc;
}

namespace {

[[noreturn]] void miss(const std::string& where, const std::string& key) {
    throw std::runtime_error("config: missing field '" + key + "' in " + where);
}

const json& need(const json& j, const std::string& where, const std::string& key) {
    const auto it = j.find(key);
    if (it == j.end()) miss(where, key);
    return *it;
}

double num(const json& j, const std::string& where, const std::string& key) {
    const json& v = need(j, where, key);
    if (!v.is_number()) throw std::runtime_error("config: " + where + "." + key + " must be a number");
    return v.get<double>();
}

double num_or(const json& j, const std::string& key, double fallback) {
    const auto it = j.find(key);
    return it == j.end() ? fallback : it->get<double>();
}

std::vector<double> num_list(const json& j, const std::string& where, const std::string& key) {
    const json& v = need(j, where, key);
    if (!v.is_array()) throw std::runtime_error("config: " + where + "." + key + " must be a list");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(e.get<double>());
    return out;
}

Variogram variogram_from(const json& j, const std::string& where) {
    Variogram v;
    v.model = variogram_model_from_string(need(j, where, "model").get<std::string>());
    v.nugget = num(j, where, "nugget");
    v.sill = num(j, where, "sill");
    v.range = num(j, where, "range_m");
    if (j.contains("anisotropy")) {
        const json& a = j["anisotropy"];
        v.anisotropy = make_anisotropy(num(a, where + ".anisotropy", "angle_deg"),
                                       num(a, where + ".anisotropy", "ratio"));
    }
    return v;
}

json variogram_to(const Variogram& v) {
    json j{{"model", to_string(v.model)},
           {"nugget", v.nugget},
           {"sill", v.sill},
           {"range_m", v.range}};
    const std::array<double, 4> id{1.0, 0.0, 0.0, 1.0};
    if (v.anisotropy != id) {
        // recover (angle, ratio) from the transform built by make_anisotropy
        const double angle = std::atan2(v.anisotropy[1], v.anisotropy[0]) * 180.0 /
                             3.14159265358979323846;
        const double ratio = std::hypot(v.anisotropy[0], v.anisotropy[1]) /
                             std::hypot(v.anisotropy[2], v.anisotropy[3]);
        j["anisotropy"] = json{{"angle_deg", angle}, {"ratio", ratio}};
    }
    return j;
}

DepthDistribution depth_from(const json& j, const std::string& where) {
    DepthDistribution d;
    const std::string kind = need(j, where, "dist").get<std::string>();
    if (kind == "constant") {
        d.kind = DepthDistribution::Kind::constant;
        d.lo = d.hi = num(j, where, "value_m");
    } else if (kind == "uniform" || kind == "triangular") {
        d.kind = kind == "uniform" ? DepthDistribution::Kind::uniform
                                   : DepthDistribution::Kind::triangular;
        d.lo = num(j, where, "min_m");
        d.hi = num(j, where, "max_m");
    } else {
        throw std::runtime_error("config: unknown depth dist '" + kind + "'");
    }
    return d;
}

json depth_to(const DepthDistribution& d) {
    switch (d.kind) {
        case DepthDistribution::Kind::constant:
            return json{{"dist", "constant"}, {"value_m", d.lo}};
        case DepthDistribution::Kind::uniform:
            return json{{"dist", "uniform"}, {"min_m", d.lo}, {"max_m", d.hi}};
        case DepthDistribution::Kind::triangular:
            return json{{"dist", "triangular"}, {"min_m", d.lo}, {"max_m", d.hi}};
    }
    return {};
}

} // namespace

Scenario scenario_from_json(const json& tree) {
    if (tree.contains("schema_version") && tree["schema_version"].get<int>() != kConfigSchemaVersion)
        throw std::runtime_error("config: unsupported schema_version");
    Scenario sc;
    for (const auto& e : need(tree, "scenario", "elements")) sc.elements.push_back(e.get<std::string>());

    const json& plan = need(tree, "scenario", "plan");
    const auto extent = num_list(plan, "plan", "extent_m");
    if (extent.size() != 2) throw std::runtime_error("config: plan.extent_m must have 2 entries");
    sc.plan.extent_x = extent[0];
    sc.plan.extent_y = extent[1];
    const json& grid = need(plan, "plan", "grid");
    sc.plan.nx = grid.at(0).get<int>();
    sc.plan.ny = grid.at(1).get<int>();
    const std::string pattern = need(plan, "plan", "pattern").get<std::string>();
    if (pattern != "alternate-columns")
        throw std::runtime_error("config: unsupported plan.pattern '" + pattern + "'");
    sc.plan.rounds.clear();
    for (const auto& r : need(plan, "plan", "rounds")) {
        Round round;
        round.label = need(r, "round", "label").get<std::string>();
        round.time_yr = num(r, "round", "time_yr");
        const std::string when = need(r, "round", "when").get<std::string>();
        if (when != "before" && when != "after")
            throw std::runtime_error("config: round.when must be before|after");
        round.after_spreading = when == "after";
        sc.plan.rounds.push_back(round);
    }
    const json& st = need(plan, "plan", "stencil");
    const std::string kind = need(st, "stencil", "kind").get<std::string>();
    if (kind == "single") {
        sc.plan.stencil = {Stencil::Kind::single, 1, 0.0};
    } else if (kind == "circle") {
        sc.plan.stencil = {Stencil::Kind::circle, static_cast<int>(num(st, "stencil", "cores")),
                           num(st, "stencil", "radius_m")};
    } else {
        throw std::runtime_error("config: unknown stencil kind '" + kind + "'");
    }
    const json& noise = need(plan, "plan", "location_noise");
    sc.plan.sigma_sample = num(noise, "location_noise", "sample_sd_m");
    sc.plan.sigma_core = num(noise, "location_noise", "core_sd_m");
    sc.plan.depth = depth_from(need(plan, "plan", "depth"), "plan.depth");
    sc.plan.core_area = num(plan, "plan", "core_area_m2");

    const json& feed = need(tree, "scenario", "feedstock");
    sc.feedstock.mean_conc = num_list(feed, "feedstock", "conc");
    sc.feedstock.conc_rel_sd = num(feed, "feedstock", "conc_rel_sd");
    sc.feedstock.density = num(feed, "feedstock", "density_kg_m3");
    const json& prof = need(feed, "feedstock", "mixing_profile");
    const std::string pk = need(prof, "mixing_profile", "dist").get<std::string>();
    if (pk == "uniform") sc.feedstock.profile.kind = MixingProfile::Kind::uniform;
    else if (pk == "triangular") sc.feedstock.profile.kind = MixingProfile::Kind::triangular;
    else throw std::runtime_error("config: unknown mixing_profile dist '" + pk + "'");
    sc.feedstock.profile.max_depth = num(prof, "mixing_profile", "max_m");

    const json& app = need(tree, "scenario", "application");
    sc.application.mean_rate = num(app, "application", "mean_kg_m2");
    sc.application.variogram = variogram_from(need(app, "application", "variogram"),
                                              "application.variogram");

    const json& soil = need(tree, "scenario", "soil");
    sc.soil.conc_mean = num_list(soil, "soil", "conc_mean");
    sc.soil.conc_variogram.clear();
    for (const auto& v : need(soil, "soil", "conc_variograms"))
        sc.soil.conc_variogram.push_back(variogram_from(v, "soil.conc_variograms[]"));
    sc.soil.cross_correlation = num(soil, "soil", "cross_correlation");
    const json& dens = need(soil, "soil", "density");
    sc.soil.density_mean = num(dens, "soil.density", "mean_kg_m3");
    sc.soil.density_variogram = variogram_from(need(dens, "soil.density", "variogram"),
                                               "soil.density.variogram");

    const json& losses = need(tree, "scenario", "losses");
    sc.losses.rate_per_yr = num_list(losses, "losses", "rates_per_yr");
    const std::string bulk = need(losses, "losses", "bulk").get<std::string>();
    if (bulk == "none") sc.losses.bulk = BulkLossMode::none;
    else if (bulk == "cation_weighted") sc.losses.bulk = BulkLossMode::cation_weighted;
    else throw std::runtime_error("config: losses.bulk must be none|cation_weighted");

    const json& ns = need(tree, "scenario", "noise");
    sc.noise.conc_rel_sd = num_or(ns, "conc_rel_sd", 0.0);
    sc.noise.mass_rel_sd = num_or(ns, "mass_rel_sd", 0.0);

    sc.validate();
    return sc;
}

json scenario_to_json(const Scenario& sc) {
    json rounds = json::array();
    for (const Round& r : sc.plan.rounds)
        rounds.push_back(json{{"label", r.label},
                              {"time_yr", r.time_yr},
                              {"when", r.after_spreading ? "after" : "before"}});
    json stencil = sc.plan.stencil.kind == Stencil::Kind::single
                       ? json{{"kind", "single"}}
                       : json{{"kind", "circle"},
                              {"cores", sc.plan.stencil.n_cores},
                              {"radius_m", sc.plan.stencil.radius}};
    json vgs = json::array();
    for (const auto& v : sc.soil.conc_variogram) vgs.push_back(variogram_to(v));

    return json{
        {"schema_version", kConfigSchemaVersion},
        {"elements", sc.elements},
        {"plan",
         {{"extent_m", json::array({sc.plan.extent_x, sc.plan.extent_y})},
          {"grid", json::array({sc.plan.nx, sc.plan.ny})},
          {"pattern", "alternate-columns"},
          {"rounds", rounds},
          {"stencil", stencil},
          {"location_noise",
           {{"sample_sd_m", sc.plan.sigma_sample}, {"core_sd_m", sc.plan.sigma_core}}},
          {"depth", depth_to(sc.plan.depth)},
          {"core_area_m2", sc.plan.core_area}}},
        {"feedstock",
         {{"conc", sc.feedstock.mean_conc},
          {"conc_rel_sd", sc.feedstock.conc_rel_sd},
          {"density_kg_m3", sc.feedstock.density},
          {"mixing_profile",
           {{"dist", sc.feedstock.profile.kind == MixingProfile::Kind::uniform ? "uniform"
                                                                               : "triangular"},
            {"max_m", sc.feedstock.profile.max_depth}}}}},
        {"application",
         {{"mean_kg_m2", sc.application.mean_rate},
          {"variogram", variogram_to(sc.application.variogram)}}},
        {"soil",
         {{"conc_mean", sc.soil.conc_mean},
          {"conc_variograms", vgs},
          {"cross_correlation", sc.soil.cross_correlation},
          {"density",
           {{"mean_kg_m3", sc.soil.density_mean},
            {"variogram", variogram_to(sc.soil.density_variogram)}}}}},
        {"losses",
         {{"rates_per_yr", sc.losses.rate_per_yr},
          {"bulk", sc.losses.bulk == BulkLossMode::none ? "none" : "cation_weighted"}}},
        {"noise", {{"conc_rel_sd", sc.noise.conc_rel_sd}, {"mass_rel_sd", sc.noise.mass_rel_sd}}}};
}

Scenario load_scenario(const std::string& path) {
    return scenario_from_json(parse_config_file(path));
}

} // namespace erw
