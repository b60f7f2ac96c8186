#include "windroute/planner.hpp"

#include <cmath>
#include <sstream>

#include "windroute/errors.hpp"

namespace windroute {

double Trajectory::length_nm() const
{
    double total = 0.0;
    for (const auto& s : segments) total += s.length_nm;
    return total;
}

TrajectoryLibrary build_fan_library(int count, double arc_length_nm, double fan_halfwidth_deg, int segments)
{
    if (count < 2) throw InputError("build_fan_library: need at least 2 trajectories");
    if (segments < 1) throw InputError("build_fan_library: need at least 1 segment per trajectory");
    if (!(arc_length_nm > 0.0)) throw InputError("build_fan_library: arc length must be > 0");
    if (!(fan_halfwidth_deg > 0.0 && fan_halfwidth_deg < 180.0)) {
        throw InputError("build_fan_library: halfwidth must be in (0, 180)");
    }

    TrajectoryLibrary lib;
    lib.arc_length_nm = arc_length_nm;
    lib.fan_halfwidth_deg = fan_halfwidth_deg;
    const double seg_len = arc_length_nm / segments;
    for (int k = 0; k < count; ++k) {
        // symmetric by construction: trajectory k mirrors count-1-k
        const double final_change = fan_halfwidth_deg * (2.0 * k - (count - 1)) / (count - 1);
        Trajectory t;
        t.id = static_cast<std::size_t>(k);
        for (int i = 1; i <= segments; ++i) {
            const double len = i == segments ? arc_length_nm - seg_len * (segments - 1) : seg_len;
            t.segments.push_back(TrajectorySegment{final_change * i / segments, len});
        }
        lib.trajectories.push_back(std::move(t));
    }
    return lib;
}

TrajectoryPath trace_trajectory(const Trajectory& traj, const GeoPoint& start, double start_course_deg)
{
    TrajectoryPath path;
    path.segments.reserve(traj.segments.size());
    GeoPoint pos = start;
    double reference = start_course_deg;
    double course_at_end = start_course_deg;
    for (const auto& seg : traj.segments) {
        const double course = wrap360(reference + seg.heading_change_deg);
        const GeoPoint mid = project_nm(pos, course, 0.5 * seg.length_nm);
        const GeoPoint end = project_nm(pos, course, seg.length_nm);
        course_at_end = final_bearing_deg(pos, end);
        reference += wrap180(course_at_end - course);
        path.segments.push_back(PathSegment{pos, mid, end, course, seg.length_nm});
        pos = end;
    }
    path.end = pos;
    path.end_course_deg = course_at_end;
    return path;
}

RewardResult trajectory_reward(const TrajectoryPath& path, const GeoPoint& goal, std::span<const WindVector> winds,
                               double airspeed_kt)
{
    if (winds.size() != path.segments.size()) throw InputError("trajectory_reward: one wind per segment required");
    RewardResult r;
    double hours = 0.0;
    for (std::size_t i = 0; i < winds.size(); ++i) {
        const auto& seg = path.segments[i];
        const auto [along, cross] = track_components(winds[i], seg.course_deg);
        if (std::abs(cross) >= airspeed_kt) return r;
        const double gs = along + std::sqrt(airspeed_kt * airspeed_kt - cross * cross);
        if (!(gs > 0.0)) return r;
        hours += seg.length_nm / gs;
    }
    if (path.segments.empty()) return r;
    const GeoPoint& start = path.segments.front().start;
    const double progress = great_circle_distance_nm(start, goal) - great_circle_distance_nm(path.end, goal);
    r.feasible = true;
    r.time_s = hours * 3600.0;
    r.reward = progress / hours;
    return r;
}

RewardResult trajectory_reward(const Trajectory& traj, const GeoPoint& start, double start_course_deg,
                               const GeoPoint& goal, std::span<const WindVector> winds, double airspeed_kt)
{
    return trajectory_reward(trace_trajectory(traj, start, start_course_deg), goal, winds, airspeed_kt);
}

void PlannerConfig::validate() const
{
    auto positive = [](double x, const char* name) {
        if (!(x > 0.0) || !std::isfinite(x)) {
            std::ostringstream os;
            os << "planner." << name << " must be finite and > 0 (got " << x << ")";
            throw ConfigError(os.str());
        }
    };
    positive(airspeed_kt, "airspeed_kt");
    positive(goal_radius_nm, "goal_radius_nm");
    positive(replan_segment_count, "replan_segment_count");
    positive(observation_spacing_nm, "observation_spacing_nm");
    positive(observation_noise_sd_kt, "observation_noise_sd_kt");
    positive(sensitivity_step_kt, "sensitivity_step_kt");
    if (!(ucb_delta > 0.0 && ucb_delta < 1.0)) throw ConfigError("planner.ucb_delta must be in (0, 1)");
    if (beta_t_override && !(*beta_t_override >= 0.0)) throw ConfigError("planner.beta_t must be >= 0");
}

double ucb_beta(std::size_t library_size, std::size_t round, double delta)
{
    const double k = static_cast<double>(library_size);
    const double t = static_cast<double>(std::max<std::size_t>(round, 1));
    return 2.0 * std::log(k * t * t * kPi * kPi / (6.0 * delta));
}

RewardEstimate reward_confidence(const TrajectoryPath& path, const GeoPoint& goal,
                                 std::span<const WindVector> mean_winds, std::span<const ComponentSd> wind_sds,
                                 std::size_t round, std::size_t library_size, const PlannerConfig& config)
{
    if (wind_sds.size() != mean_winds.size()) throw InputError("reward_confidence: mean/sd length mismatch");
    RewardEstimate est;
    const RewardResult base = trajectory_reward(path, goal, mean_winds, config.airspeed_kt);
    if (!base.feasible) return est;
    est.feasible = true;
    est.mean = base.reward;

    const double h = config.sensitivity_step_kt;
    std::vector<WindVector> w(mean_winds.begin(), mean_winds.end());
    double var = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        for (int c = 0; c < 2; ++c) {
            double& comp = c == 0 ? w[i].u_kt : w[i].v_kt;
            const double sd = c == 0 ? wind_sds[i].u_kt : wind_sds[i].v_kt;
            if (sd == 0.0) continue;
            const double saved = comp;
            comp = saved + h;
            const RewardResult up = trajectory_reward(path, goal, w, config.airspeed_kt);
            comp = saved - h;
            const RewardResult down = trajectory_reward(path, goal, w, config.airspeed_kt);
            comp = saved;
            double deriv = 0.0;
            if (up.feasible && down.feasible) {
                deriv = (up.reward - down.reward) / (2.0 * h);
            } else if (up.feasible) {
                deriv = (up.reward - base.reward) / h;
            } else if (down.feasible) {
                deriv = (base.reward - down.reward) / h;
            }
            var += deriv * deriv * sd * sd;
        }
    }
    est.sd = std::sqrt(var);
    const double beta = config.beta_t_override ? *config.beta_t_override
                                               : ucb_beta(library_size, round, config.ucb_delta);
    est.ucb = est.mean + std::sqrt(beta) * est.sd;
    return est;
}

RewardEstimate reward_confidence(const Trajectory& traj, const GeoPoint& start, double start_course_deg,
                                 const GeoPoint& goal, const WindPosterior& midpoint_posterior, std::size_t round,
                                 std::size_t library_size, const PlannerConfig& config)
{
    const TrajectoryPath path = trace_trajectory(traj, start, start_course_deg);
    if (midpoint_posterior.size() != path.segments.size()) {
        throw InputError("reward_confidence: posterior must cover every segment midpoint");
    }
    return reward_confidence(path, goal, midpoint_posterior.mean, midpoint_posterior.sd, round, library_size, config);
}

std::size_t ucb_select(std::span<const RewardEstimate> estimates)
{
    std::size_t best = estimates.size();
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        if (!estimates[i].feasible) continue;
        if (best == estimates.size() || estimates[i].ucb > estimates[best].ucb) best = i;
    }
    if (best == estimates.size()) throw NoFeasibleTrajectoryError("ucb_select: no feasible trajectory");
    return best;
}

} // namespace windroute
