#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "windroute/wind.hpp"

namespace windroute {

struct TrajectorySegment {
    /// Course relative to the start course, transported along the path so
    /// that a constant zero change flies a great circle.
    double heading_change_deg = 0.0;
    double length_nm = 0.0;
};

struct Trajectory {
    std::size_t id = 0;
    std::vector<TrajectorySegment> segments;

    double length_nm() const;
    double net_heading_change_deg() const { return segments.empty() ? 0.0 : segments.back().heading_change_deg; }
};

struct TrajectoryLibrary {
    std::vector<Trajectory> trajectories;
    double arc_length_nm = 0.0;
    double fan_halfwidth_deg = 0.0;

    std::size_t size() const { return trajectories.size(); }
};

/// K constant-curvature arcs whose final course changes are evenly spaced
/// over [-halfwidth, +halfwidth]. Segment i of M carries the course change
/// final * i / M. Throws InputError for K < 2, M < 1, non-positive arc
/// length, or a halfwidth outside (0, 180).
TrajectoryLibrary build_fan_library(int count, double arc_length_nm, double fan_halfwidth_deg, int segments);

struct PathSegment {
    GeoPoint start;
    GeoPoint midpoint;
    GeoPoint end;
    double course_deg = 0.0;
    double length_nm = 0.0;
};

/// A trajectory laid out on the sphere from a start pose.
struct TrajectoryPath {
    std::vector<PathSegment> segments;
    GeoPoint end;
    /// Course on arrival at the end of the last segment.
    double end_course_deg = 0.0;
};

TrajectoryPath trace_trajectory(const Trajectory& traj, const GeoPoint& start, double start_course_deg);

struct RewardResult {
    /// Progress toward the goal per hour of flight, nm/h.
    double reward = 0.0;
    double time_s = 0.0;
    bool feasible = false;
};

/// reward = (d(start, goal) - d(end, goal)) / traversal time, with each
/// segment timed at the wind-triangle ground speed for its course. A segment
/// whose crosswind reaches the airspeed, or whose ground speed is not
/// positive, makes the trajectory infeasible.
RewardResult trajectory_reward(const TrajectoryPath& path, const GeoPoint& goal, std::span<const WindVector> winds,
                               double airspeed_kt);

RewardResult trajectory_reward(const Trajectory& traj, const GeoPoint& start, double start_course_deg,
                               const GeoPoint& goal, std::span<const WindVector> winds, double airspeed_kt);

struct PlannerConfig {
    double airspeed_kt = 250.0;
    double goal_radius_nm = 25.0;
    int replan_segment_count = 3;
    double ucb_delta = 0.1;
    /// Fixed exploration weight beta_t; the schedule is used when unset.
    std::optional<double> beta_t_override;
    double observation_spacing_nm = 20.0;
    double observation_noise_sd_kt = 2.0;
    /// Central-difference step for reward sensitivities.
    double sensitivity_step_kt = 0.5;

    /// Throws ConfigError naming the first violated bound.
    void validate() const;
};

/// Exploration weight beta_t = 2 ln(K t^2 pi^2 / (6 delta)) at round t >= 1.
double ucb_beta(std::size_t library_size, std::size_t round, double delta);

struct RewardEstimate {
    double mean = 0.0;
    double sd = 0.0;
    double ucb = 0.0;
    bool feasible = false;
};

/// Reward at the posterior mean winds, and its sd by first-order
/// propagation of independent per-segment, per-component wind sds.
RewardEstimate reward_confidence(const TrajectoryPath& path, const GeoPoint& goal,
                                 std::span<const WindVector> mean_winds, std::span<const ComponentSd> wind_sds,
                                 std::size_t round, std::size_t library_size, const PlannerConfig& config);

/// Same, with the posterior given at the segment midpoints of `traj`
/// traced from (start, start_course_deg).
RewardEstimate reward_confidence(const Trajectory& traj, const GeoPoint& start, double start_course_deg,
                                 const GeoPoint& goal, const WindPosterior& midpoint_posterior, std::size_t round,
                                 std::size_t library_size, const PlannerConfig& config);

/// Index of the feasible estimate with the largest ucb; ties go to the lowest
/// index. Throws NoFeasibleTrajectoryError when none is feasible.
std::size_t ucb_select(std::span<const RewardEstimate> estimates);

} // namespace windroute
