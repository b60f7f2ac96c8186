#include "windroute/sim.hpp"

#include <cmath>
#include <optional>
#include <random>
#include <sstream>

#include "windroute/errors.hpp"
#include "windroute/gp.hpp"

namespace windroute {

std::string to_string(Policy p)
{
    switch (p) {
    case Policy::Ucb: return "ucb";
    case Policy::Mean: return "mean";
    case Policy::Gcr: return "gcr";
    }
    return "unknown";
}

Policy parse_policy(std::string_view name)
{
    if (name == "ucb") return Policy::Ucb;
    if (name == "mean") return Policy::Mean;
    if (name == "gcr") return Policy::Gcr;
    throw ConfigError("unknown policy '" + std::string(name) + "' (expected ucb, mean or gcr)");
}

void LibraryConfig::validate() const
{
    if (count < 2) throw ConfigError("library.count must be >= 2");
    if (segments < 1) throw ConfigError("library.segments must be >= 1");
    if (!(arc_length_nm > 0.0) || !std::isfinite(arc_length_nm)) throw ConfigError("library.arc_length_nm must be > 0");
    if (!(fan_halfwidth_deg > 0.0 && fan_halfwidth_deg < 180.0)) {
        throw ConfigError("library.fan_halfwidth_deg must be in (0, 180)");
    }
}

void SimConfig::validate() const
{
    planner.validate();
    library.validate();
    model.validate();
    if (!(cruise_alt_ft >= 0.0) || !std::isfinite(cruise_alt_ft)) throw ConfigError("sim.cruise_alt_ft must be >= 0");
    if (!(gcr_step_nm > 0.0) || !std::isfinite(gcr_step_nm)) throw ConfigError("sim.gcr_step_nm must be > 0");
    if (!(timeout_factor > 1.0) || !std::isfinite(timeout_factor)) throw ConfigError("sim.timeout_factor must be > 1");
}

namespace {

class Flight {
public:
    Flight(Policy policy, const GeoPoint& start, const GeoPoint& goal, const GroundTruthWindField& truth,
           const SimConfig& config, std::uint64_t seed)
        : truth_(truth), config_(config), goal_(goal), rng_(seed), noise_(0.0, config.planner.observation_noise_sd_kt)
    {
        log_.policy = policy;
        pos_ = start;
        pos_.alt_ft = config.cruise_alt_ft;
        goal_.alt_ft = config.cruise_alt_ft;
        log_.waypoints.push_back(Waypoint{pos_, 0.0});
        const double d = great_circle_distance_nm(pos_, goal_);
        cap_s_ = config.timeout_factor * d / config.planner.airspeed_kt * 3600.0;
        to_next_obs_nm_ = config.planner.observation_spacing_nm;
    }

    const GeoPoint& position() const { return pos_; }
    const GeoPoint& goal() const { return goal_; }
    double distance_to_goal() const { return great_circle_distance_nm(pos_, goal_); }
    FlightLog& log() { return log_; }

    /// Ground speed on `course` through the true wind at `mid`, if feasible.
    std::optional<double> true_ground_speed(const GeoPoint& mid, double course, WindVector& wind) const
    {
        wind = truth_.at(mid);
        const auto [along, cross] = track_components(wind, course);
        const double a = config_.planner.airspeed_kt;
        if (std::abs(cross) >= a) return std::nullopt;
        const double gs = along + std::sqrt(a * a - cross * cross);
        if (!(gs > 0.0)) return std::nullopt;
        return gs;
    }

    /// Flies a great-circle leg; returns false (without moving) when the true
    /// wind makes it infeasible.
    bool fly(const GeoPoint& to, double course, double length_nm, const GeoPoint& mid, bool observe)
    {
        WindVector wind;
        const auto gs = true_ground_speed(mid, course, wind);
        if (!gs) return false;
        const double dt = length_nm / *gs * 3600.0;
        if (observe) collect(pos_, course, length_nm);
        FlightLeg leg{pos_, to, course, length_nm, wind, *gs, dt};
        leg.to.alt_ft = config_.cruise_alt_ft;
        log_.legs.push_back(leg);
        elapsed_s_ += dt;
        pos_ = leg.to;
        log_.waypoints.push_back(Waypoint{pos_, elapsed_s_});
        if (elapsed_s_ > cap_s_) {
            std::ostringstream os;
            os << to_string(log_.policy) << " flight exceeded the time cap of " << cap_s_ << " s";
            throw SimulationTimeoutError(os.str());
        }
        return true;
    }

    /// One great-circle step of at most `step_nm` toward the goal.
    bool step_toward_goal(double step_nm, bool observe)
    {
        const double remaining = distance_to_goal();
        const double course = initial_bearing_deg(pos_, goal_);
        if (remaining <= step_nm * (1.0 + 1e-12)) {
            return fly(goal_, course, remaining, project_nm(pos_, course, 0.5 * remaining), observe);
        }
        return fly(project_nm(pos_, course, step_nm), course, step_nm, project_nm(pos_, course, 0.5 * step_nm),
                   observe);
    }

    /// Direct great-circle flight to the goal in fixed steps.
    void fly_direct(bool observe)
    {
        while (distance_to_goal() > 0.0) {
            if (!step_toward_goal(config_.gcr_step_nm, observe)) {
                std::ostringstream os;
                os << to_string(log_.policy) << " flight stuck at (" << pos_.lat_deg << ", " << pos_.lon_deg
                   << "): crosswind on the direct course reaches the airspeed";
                throw SimulationStuckError(os.str());
            }
        }
    }

    void finish() { log_.total_time_s = elapsed_s_; }

private:
    void collect(const GeoPoint& from, double course, double length_nm)
    {
        double offset = to_next_obs_nm_;
        while (offset <= length_nm) {
            GeoPoint p = project_nm(from, course, offset);
            p.alt_ft = config_.cruise_alt_ft;
            const WindVector w = truth_.at(p);
            const double du = noise_(rng_);
            const double dv = noise_(rng_);
            log_.observations.push_back(StationObservation{p, WindVector{w.u_kt + du, w.v_kt + dv}});
            offset += config_.planner.observation_spacing_nm;
        }
        to_next_obs_nm_ = offset - length_nm;
    }

    const GroundTruthWindField& truth_;
    const SimConfig& config_;
    GeoPoint goal_;
    GeoPoint pos_;
    FlightLog log_;
    double elapsed_s_ = 0.0;
    double cap_s_ = 0.0;
    double to_next_obs_nm_ = 0.0;
    std::mt19937_64 rng_;
    std::normal_distribution<double> noise_;
};

WindPosterior planner_posterior(std::span<const StationObservation> prior, std::span<const StationObservation> seen,
                                std::span<const GeoPoint> queries, const ModelHyperparams& h)
{
    std::vector<StationObservation> data(prior.begin(), prior.end());
    data.insert(data.end(), seen.begin(), seen.end());
    if (data.empty()) {
        WindPosterior p;
        p.sites.assign(queries.begin(), queries.end());
        p.mean.assign(queries.size(), WindVector{0.0, 0.0});
        p.sd.assign(queries.size(), ComponentSd{h.signal_sd_kt, h.signal_sd_kt});
        return p;
    }
    return gp_regress(data, queries, h);
}

} // namespace

FlightLog simulate_flight(Policy policy, const GeoPoint& start, const GeoPoint& goal,
                          const GroundTruthWindField& truth, std::span<const StationObservation> prior_stations,
                          const SimConfig& config, std::uint64_t seed)
{
    config.validate();
    if (start.same_position(goal)) throw InputError("simulate_flight: start and goal coincide");
    const double goal_radius = config.planner.goal_radius_nm;
    if (great_circle_distance_nm(start, goal) <= goal_radius) {
        throw InputError("simulate_flight: start lies within the goal radius");
    }

    Flight flight(policy, start, goal, truth, config, seed);
    if (policy == Policy::Gcr) {
        flight.fly_direct(false);
        flight.finish();
        return std::move(flight.log());
    }

    PlannerConfig planner = config.planner;
    if (policy == Policy::Mean) planner.beta_t_override = 0.0;
    const TrajectoryLibrary lib = build_fan_library(config.library.count, config.library.arc_length_nm,
                                                    config.library.fan_halfwidth_deg, config.library.segments);
    const double fallback_step = config.library.arc_length_nm / config.library.segments;

    double course = initial_bearing_deg(flight.position(), flight.goal());
    std::size_t round = 0;
    std::vector<TrajectoryPath> paths(lib.size());
    std::vector<GeoPoint> queries;
    std::vector<RewardEstimate> estimates(lib.size());

    while (flight.distance_to_goal() > goal_radius) {
        ++round;
        queries.clear();
        for (std::size_t k = 0; k < lib.size(); ++k) {
            paths[k] = trace_trajectory(lib.trajectories[k], flight.position(), course);
            for (const auto& seg : paths[k].segments) queries.push_back(seg.midpoint);
        }
        const WindPosterior post = planner_posterior(prior_stations, flight.log().observations, queries, config.model);

        std::size_t offset = 0;
        for (std::size_t k = 0; k < lib.size(); ++k) {
            const std::size_t m = paths[k].segments.size();
            const std::span<const WindVector> mean(post.mean.data() + offset, m);
            const std::span<const ComponentSd> sd(post.sd.data() + offset, m);
            estimates[k] = reward_confidence(paths[k], flight.goal(), mean, sd, round, lib.size(), planner);
            offset += m;
        }

        std::optional<std::size_t> choice;
        try {
            choice = ucb_select(estimates);
        } catch (const NoFeasibleTrajectoryError&) {
        }

        bool moved = false;
        if (choice) {
            flight.log().choices.push_back(*choice);
            const auto& segs = paths[*choice].segments;
            const std::size_t n = std::min<std::size_t>(segs.size(), planner.replan_segment_count);
            for (std::size_t i = 0; i < n; ++i) {
                const auto& seg = segs[i];
                if (!flight.fly(seg.end, seg.course_deg, seg.length_nm, seg.midpoint, true)) break;
                moved = true;
                course = final_bearing_deg(seg.start, seg.end);
                if (flight.distance_to_goal() <= goal_radius) break;
            }
        }
        if (!moved) {
            const GeoPoint before = flight.position();
            if (!flight.step_toward_goal(fallback_step, true)) {
                std::ostringstream os;
                os << to_string(policy) << " flight stuck at (" << before.lat_deg << ", " << before.lon_deg
                   << "): no feasible trajectory and the direct course is infeasible";
                throw SimulationStuckError(os.str());
            }
            ++flight.log().fallback_steps;
            if (!flight.position().same_position(flight.goal())) {
                course = final_bearing_deg(before, flight.position());
            }
        }
    }

    flight.fly_direct(true);
    flight.finish();
    return std::move(flight.log());
}

} // namespace windroute
