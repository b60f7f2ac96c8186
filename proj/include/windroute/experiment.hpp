#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "windroute/sim.hpp"

namespace windroute {

struct Route {
    std::string name;
    GeoPoint start;
    GeoPoint goal;
};

/// Greenville-Spartanburg, SC to Moab, UT (about 1340 nm).
Route sc_to_ut_route();
/// Seattle-Tacoma to Miami (about 2365 nm).
Route seattle_to_miami_route();

/// Recipe for the ground-truth wind of one repetition. Components add up:
/// uniform wind, a jet band along the route, a seeded GP perturbation, and
/// the GP mean of a bulletin snapshot.
struct WorldRecipe {
    WindVector uniform{0.0, 0.0};
    /// Peak speed of a band blowing from the goal toward the start (a
    /// headwind for the great-circle route); 0 disables it.
    double jet_core_kt = 0.0;
    /// Cross-track sd of the band; <= 0 makes it route-aligned and uniform.
    double jet_width_nm = 150.0;
    /// Seeded GP perturbation, re-drawn every repetition; 0 disables it.
    double perturbation_sd_kt = 0.0;
    double perturbation_length_nm = 250.0;
    double perturbation_spacing_nm = 100.0;
    /// Bulletin snapshot whose GP mean is added to the field.
    std::vector<StationObservation> bulletin;
    ModelHyperparams bulletin_model;
    /// Prior station network the planner starts from: a grid of noisy reports
    /// of the truth covering the route box. spacing <= 0 disables it.
    double station_spacing_nm = 200.0;
    double station_noise_sd_kt = 5.0;
    /// Spatially correlated forecast error added to the station reports: a
    /// seeded GP sample with this sd and perturbation_length_nm; 0 disables it.
    double forecast_error_sd_kt = 0.0;
    /// Margin around the route bounding box for the perturbation and stations.
    double margin_nm = 300.0;

    void validate() const;
};

GroundTruthWindField make_truth(const WorldRecipe& recipe, const Route& route, std::uint64_t seed);

std::vector<StationObservation> make_prior_stations(const WorldRecipe& recipe, const Route& route,
                                                    const GroundTruthWindField& truth, double alt_ft,
                                                    std::uint64_t seed);

struct RunRecord {
    std::string route;
    Policy policy = Policy::Gcr;
    std::size_t repetition = 0;
    std::uint64_t seed = 0;
    std::string slot;
    bool ok = false;
    double total_time_s = 0.0;
    std::string error;
};

struct CellSummary {
    std::string route;
    Policy policy = Policy::Gcr;
    double mean_s = 0.0;
    /// Sample standard deviation over successful runs (0 for n < 2).
    double sd_s = 0.0;
    std::size_t n = 0;
    std::size_t failures = 0;
};

struct ExperimentReport {
    std::vector<CellSummary> cells;
    std::vector<RunRecord> runs;

    /// nullptr when the cell is absent.
    const CellSummary* find(const std::string& route, Policy policy) const;
};

struct ExperimentOptions {
    std::size_t repetitions = 1;
    std::uint64_t base_seed = 1;
    /// Worker threads for independent repetitions; 0 picks the hardware
    /// concurrency. Results do not depend on this value.
    unsigned threads = 1;
};

using FlightCallback = std::function<void(const RunRecord&, const FlightLog&)>;

/// Seed of repetition r: base_seed + r. Every policy of a repetition shares
/// the truth field, the prior stations and the observation-noise stream.
std::uint64_t repetition_seed(std::uint64_t base_seed, std::size_t repetition);

/// Runs every (route, policy, repetition) cell. Simulation and numerical
/// failures are recorded per run and excluded from the aggregates; other
/// errors propagate. `on_flight` sees successful flights in deterministic
/// (route, repetition, policy) order.
ExperimentReport run_experiment(const std::vector<Route>& routes, const WorldRecipe& recipe,
                                const std::vector<Policy>& policies, const ExperimentOptions& options,
                                const SimConfig& config, const FlightCallback& on_flight = {});

} // namespace windroute
