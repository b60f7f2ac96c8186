#include "windroute/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <map>
#include <optional>
#include <random>
#include <thread>

#include "windroute/errors.hpp"

namespace windroute {

Route sc_to_ut_route()
{
    return Route{"sc-ut", GeoPoint::make(34.90, -82.22), GeoPoint::make(38.76, -109.75)};
}

Route seattle_to_miami_route()
{
    return Route{"sea-mia", GeoPoint::make(47.45, -122.31), GeoPoint::make(25.79, -80.29)};
}

void WorldRecipe::validate() const
{
    auto finite = [](double x, const char* name) {
        if (!std::isfinite(x)) throw ConfigError(std::string("world.") + name + " must be finite");
    };
    finite(uniform.u_kt, "uniform_u_kt");
    finite(uniform.v_kt, "uniform_v_kt");
    finite(jet_core_kt, "jet_core_kt");
    finite(jet_width_nm, "jet_width_nm");
    if (uniform.speed() > kMaxTruthWindKt) throw ConfigError("world: uniform wind exceeds 250 kt");
    if (std::abs(jet_core_kt) > kMaxTruthWindKt) throw ConfigError("world.jet_core_kt must be within +-250 kt");
    if (!(perturbation_sd_kt >= 0.0) || perturbation_sd_kt > kMaxTruthWindKt) {
        throw ConfigError("world.perturbation_sd_kt must be in [0, 250]");
    }
    if (!(station_noise_sd_kt >= 0.0)) throw ConfigError("world.station_noise_sd_kt must be >= 0");
    if (!(forecast_error_sd_kt >= 0.0) || forecast_error_sd_kt > kMaxTruthWindKt) {
        throw ConfigError("world.forecast_error_sd_kt must be in [0, 250]");
    }
    if ((perturbation_sd_kt > 0.0 || forecast_error_sd_kt > 0.0) &&
        (!(perturbation_length_nm > 0.0) || !(perturbation_spacing_nm > 0.0))) {
        throw ConfigError("world.perturbation_length_nm and perturbation_spacing_nm must be > 0");
    }
    if (!(station_spacing_nm >= 0.0)) throw ConfigError("world.station_spacing_nm must be >= 0 (0 = no stations)");
    if (!(margin_nm >= 0.0)) throw ConfigError("world.margin_nm must be >= 0");
    if (!bulletin.empty()) bulletin_model.validate();
}

namespace {

struct Box {
    GeoPoint south_west;
    GeoPoint north_east;
};

/// Lat/lon box around the route's great circle, padded by `margin_nm`.
Box route_box(const Route& route, double margin_nm)
{
    double lat0 = 90.0, lat1 = -90.0, lon0 = 180.0, lon1 = -180.0;
    for (int i = 0; i <= 32; ++i) {
        const GeoPoint p = interpolate(route.start, route.goal, i / 32.0);
        lat0 = std::min(lat0, p.lat_deg);
        lat1 = std::max(lat1, p.lat_deg);
        lon0 = std::min(lon0, p.lon_deg);
        lon1 = std::max(lon1, p.lon_deg);
    }
    const double nm_per_deg = deg2rad(1.0) * kEarthRadiusNm;
    const double dlat = margin_nm / nm_per_deg;
    lat0 = std::max(lat0 - dlat, -85.0);
    lat1 = std::min(lat1 + dlat, 85.0);
    const double cos_min = std::max(std::cos(deg2rad(std::max(std::abs(lat0), std::abs(lat1)))), 0.1);
    const double dlon = margin_nm / (nm_per_deg * cos_min);
    return Box{GeoPoint{lat0, std::max(lon0 - dlon, -180.0), 0.0}, GeoPoint{lat1, std::min(lon1 + dlon, 180.0), 0.0}};
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

enum Stream : std::uint64_t { kTruthStream = 1, kStationStream = 2, kFlightStream = 3 };

} // namespace

GroundTruthWindField make_truth(const WorldRecipe& recipe, const Route& route, std::uint64_t seed)
{
    recipe.validate();
    GroundTruthWindField f = GroundTruthWindField::calm();
    if (recipe.uniform.speed() > 0.0) f.add(GroundTruthWindField::uniform(recipe.uniform));
    if (recipe.jet_core_kt != 0.0) {
        f.add(GroundTruthWindField::jet(route.goal, route.start, recipe.jet_core_kt, recipe.jet_width_nm));
    }
    if (recipe.perturbation_sd_kt > 0.0) {
        ModelHyperparams h;
        h.signal_sd_kt = recipe.perturbation_sd_kt;
        h.lengthscale_h_nm = recipe.perturbation_length_nm;
        const Box box = route_box(route, recipe.margin_nm);
        f.add(GroundTruthWindField::gp_sample(box.south_west, box.north_east, recipe.perturbation_spacing_nm, h,
                                              seed));
    }
    if (!recipe.bulletin.empty()) f.add(GroundTruthWindField::from_stations(recipe.bulletin, recipe.bulletin_model));
    return f;
}

std::vector<StationObservation> make_prior_stations(const WorldRecipe& recipe, const Route& route,
                                                    const GroundTruthWindField& truth, double alt_ft,
                                                    std::uint64_t seed)
{
    std::vector<StationObservation> out;
    if (!(recipe.station_spacing_nm > 0.0)) return out;
    const Box box = route_box(route, recipe.margin_nm);
    const double nm_per_deg = deg2rad(1.0) * kEarthRadiusNm;
    const double dlat = recipe.station_spacing_nm / nm_per_deg;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, recipe.station_noise_sd_kt);
    std::optional<GroundTruthWindField> error;
    if (recipe.forecast_error_sd_kt > 0.0) {
        ModelHyperparams h;
        h.signal_sd_kt = recipe.forecast_error_sd_kt;
        h.lengthscale_h_nm = recipe.perturbation_length_nm;
        error = GroundTruthWindField::gp_sample(box.south_west, box.north_east, recipe.perturbation_spacing_nm, h,
                                                rng());
    }
    for (double lat = box.south_west.lat_deg; lat <= box.north_east.lat_deg + 1e-9; lat += dlat) {
        const double dlon = recipe.station_spacing_nm / (nm_per_deg * std::max(std::cos(deg2rad(lat)), 0.1));
        for (double lon = box.south_west.lon_deg; lon <= box.north_east.lon_deg + 1e-9; lon += dlon) {
            const GeoPoint p{lat, lon, alt_ft};
            const WindVector w = truth.at(p);
            WindVector obs = error ? w + error->at(p) : w;
            if (recipe.station_noise_sd_kt > 0.0) {
                obs.u_kt += noise(rng);
                obs.v_kt += noise(rng);
            }
            out.push_back(StationObservation{p, obs});
        }
    }
    return out;
}

const CellSummary* ExperimentReport::find(const std::string& route, Policy policy) const
{
    for (const auto& c : cells) {
        if (c.route == route && c.policy == policy) return &c;
    }
    return nullptr;
}

std::uint64_t repetition_seed(std::uint64_t base_seed, std::size_t repetition) { return base_seed + repetition; }

namespace {

struct RepetitionResult {
    std::vector<RunRecord> records;
    std::vector<FlightLog> logs;
};

RepetitionResult run_repetition(const Route& route, const WorldRecipe& recipe, const std::vector<Policy>& policies,
                                std::size_t rep, std::uint64_t seed, const SimConfig& config)
{
    RepetitionResult out;
    char slot[32];
    std::snprintf(slot, sizeof slot, "slot-%03zu", rep + 1);
    const GroundTruthWindField truth = make_truth(recipe, route, mix(seed, kTruthStream));
    const auto stations =
        make_prior_stations(recipe, route, truth, config.cruise_alt_ft, mix(seed, kStationStream));
    for (const Policy p : policies) {
        RunRecord rec{route.name, p, rep, seed, slot, false, 0.0, {}};
        FlightLog log;
        try {
            log = simulate_flight(p, route.start, route.goal, truth, stations, config, mix(seed, kFlightStream));
            rec.ok = true;
            rec.total_time_s = log.total_time_s;
        } catch (const SimulationError& e) {
            rec.error = e.what();
        } catch (const NumericalError& e) {
            rec.error = e.what();
        }
        out.records.push_back(std::move(rec));
        out.logs.push_back(std::move(log));
    }
    return out;
}

} // namespace

ExperimentReport run_experiment(const std::vector<Route>& routes, const WorldRecipe& recipe,
                                const std::vector<Policy>& policies, const ExperimentOptions& options,
                                const SimConfig& config, const FlightCallback& on_flight)
{
    if (options.repetitions < 1) throw ConfigError("experiment.repetitions must be >= 1");
    if (routes.empty()) throw ConfigError("experiment: no routes");
    if (policies.empty()) throw ConfigError("experiment: no policies");
    config.validate();
    recipe.validate();

    unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.threads;
    ExperimentReport report;
    for (const Route& route : routes) {
        std::vector<RepetitionResult> results(options.repetitions);
        for (std::size_t begin = 0; begin < options.repetitions; begin += threads) {
            const std::size_t end = std::min<std::size_t>(options.repetitions, begin + threads);
            if (end - begin == 1) {
                results[begin] = run_repetition(route, recipe, policies, begin,
                                                repetition_seed(options.base_seed, begin), config);
                continue;
            }
            std::vector<std::future<RepetitionResult>> futures;
            for (std::size_t r = begin; r < end; ++r) {
                futures.push_back(std::async(std::launch::async, run_repetition, std::cref(route), std::cref(recipe),
                                             std::cref(policies), r, repetition_seed(options.base_seed, r),
                                             std::cref(config)));
            }
            for (std::size_t r = begin; r < end; ++r) results[r] = futures[r - begin].get();
        }

        for (const auto& res : results) {
            for (std::size_t i = 0; i < res.records.size(); ++i) {
                if (on_flight && res.records[i].ok) on_flight(res.records[i], res.logs[i]);
                report.runs.push_back(res.records[i]);
            }
        }
        for (const Policy p : policies) {
            CellSummary cell;
            cell.route = route.name;
            cell.policy = p;
            std::vector<double> times;
            for (const auto& res : results) {
                for (const auto& rec : res.records) {
                    if (rec.policy != p) continue;
                    if (rec.ok) {
                        times.push_back(rec.total_time_s);
                    } else {
                        ++cell.failures;
                    }
                }
            }
            cell.n = times.size();
            if (!times.empty()) {
                double sum = 0.0;
                for (double t : times) sum += t;
                cell.mean_s = sum / times.size();
                if (times.size() > 1) {
                    double ss = 0.0;
                    for (double t : times) ss += (t - cell.mean_s) * (t - cell.mean_s);
                    cell.sd_s = std::sqrt(ss / (times.size() - 1));
                }
            }
            report.cells.push_back(cell);
        }
    }
    return report;
}

} // namespace windroute
