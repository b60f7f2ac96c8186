#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "windroute/planner.hpp"
#include "windroute/world.hpp"

namespace windroute {

enum class Policy { Ucb, Mean, Gcr };

std::string to_string(Policy p);
/// Accepts "ucb", "mean", "gcr"; throws ConfigError otherwise.
Policy parse_policy(std::string_view name);

struct LibraryConfig {
    int count = 15;
    double arc_length_nm = 100.0;
    double fan_halfwidth_deg = 60.0;
    int segments = 10;

    void validate() const;
};

struct SimConfig {
    PlannerConfig planner;
    LibraryConfig library;
    /// Hyperparameters of the planner's on-board GP.
    ModelHyperparams model;
    double cruise_alt_ft = 39000.0;
    /// Step length of the great-circle baseline and of direct legs.
    double gcr_step_nm = 10.0;
    /// Runs longer than timeout_factor * d / airspeed are aborted.
    double timeout_factor = 10.0;

    void validate() const;
};

struct FlightLeg {
    GeoPoint from;
    GeoPoint to;
    double course_deg = 0.0;
    double length_nm = 0.0;
    /// True wind at the leg midpoint.
    WindVector wind;
    double ground_speed_kt = 0.0;
    double duration_s = 0.0;
};

struct Waypoint {
    GeoPoint position;
    double elapsed_s = 0.0;
};

struct FlightLog {
    Policy policy = Policy::Gcr;
    std::vector<Waypoint> waypoints;
    std::vector<FlightLeg> legs;
    /// Library index chosen at each replanning round.
    std::vector<std::size_t> choices;
    /// Noisy in-flight wind observations, in collection order.
    std::vector<StationObservation> observations;
    /// Direct steps flown because no library trajectory was feasible.
    std::size_t fallback_steps = 0;
    double total_time_s = 0.0;
};

/// Flies one policy from `start` to `goal` through the true wind field.
/// ucb/mean replan every `replan_segment_count` segments from a GP fitted to
/// `prior_stations` plus the observations collected so far; gcr follows the
/// great circle in fixed steps. `seed` drives the observation noise.
/// Throws SimulationStuckError or SimulationTimeoutError.
FlightLog simulate_flight(Policy policy, const GeoPoint& start, const GeoPoint& goal,
                          const GroundTruthWindField& truth, std::span<const StationObservation> prior_stations,
                          const SimConfig& config, std::uint64_t seed);

} // namespace windroute
