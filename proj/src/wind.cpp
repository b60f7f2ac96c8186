#include "windroute/wind.hpp"

#include <cmath>
#include <sstream>

#include "windroute/errors.hpp"

namespace windroute {

WindVector WindVector::make(double u_kt, double v_kt)
{
    if (!std::isfinite(u_kt) || !std::isfinite(v_kt) || std::abs(u_kt) >= 500.0 || std::abs(v_kt) >= 500.0) {
        std::ostringstream os;
        os << "WindVector: component out of range (" << u_kt << ", " << v_kt << ")";
        throw InputError(os.str());
    }
    return WindVector{u_kt, v_kt};
}

WindVector WindVector::from_direction(double direction_from_deg, double speed_kt)
{
    const double th = deg2rad(direction_from_deg);
    return WindVector{-speed_kt * std::sin(th), -speed_kt * std::cos(th)};
}

double WindVector::speed() const { return std::hypot(u_kt, v_kt); }

double WindVector::direction_from_deg() const
{
    if (u_kt == 0.0 && v_kt == 0.0) return 0.0;
    return wrap360(rad2deg(std::atan2(-u_kt, -v_kt)));
}

AircraftReport AircraftReport::make(const GeoPoint& site, const WindVector& ground_velocity, double airspeed_kt,
                                    std::string aircraft_id)
{
    if (!(airspeed_kt > 0.0 && airspeed_kt < 700.0)) {
        std::ostringstream os;
        os << "AircraftReport: airspeed " << airspeed_kt << " kt outside (0, 700)";
        throw InputError(os.str());
    }
    const double gs = ground_velocity.speed();
    if (!(gs > 0.0 && gs < 900.0)) {
        std::ostringstream os;
        os << "AircraftReport: ground speed " << gs << " kt outside (0, 900)";
        throw InputError(os.str());
    }
    return AircraftReport{site, ground_velocity, airspeed_kt, std::move(aircraft_id)};
}

double AircraftReport::track_deg() const
{
    return wrap360(rad2deg(std::atan2(ground_velocity.u_kt, ground_velocity.v_kt)));
}

void ModelHyperparams::validate() const
{
    auto positive = [](double x, const char* name) {
        if (!(x > 0.0) || !std::isfinite(x)) {
            std::ostringstream os;
            os << "model." << name << " must be finite and > 0 (got " << x << ")";
            throw ConfigError(os.str());
        }
    };
    positive(lengthscale_h_nm, "lengthscale_h_nm");
    positive(lengthscale_v_ft, "lengthscale_v_ft");
    positive(signal_sd_kt, "signal_sd_kt");
    positive(station_noise_sd_kt, "station_noise_sd_kt");
    positive(aircraft_beta, "aircraft_beta");
    positive(jitter, "jitter");
    if (jitter > 1e-4 * signal_sd_kt * signal_sd_kt) {
        std::ostringstream os;
        os << "model.jitter " << jitter << " exceeds 1e-4 * signal_sd_kt^2";
        throw ConfigError(os.str());
    }
}

TrackComponents track_components(const WindVector& wind, double track_deg)
{
    const double th = deg2rad(track_deg);
    const double s = std::sin(th);
    const double c = std::cos(th);
    return TrackComponents{wind.u_kt * s + wind.v_kt * c, wind.u_kt * c - wind.v_kt * s};
}

double predict_ground_speed(const WindVector& wind, double track_deg, double airspeed_kt)
{
    if (!(airspeed_kt > 0.0)) throw InputError("predict_ground_speed: airspeed must be > 0");
    const auto [along, cross] = track_components(wind, track_deg);
    if (std::abs(cross) >= airspeed_kt) {
        std::ostringstream os;
        os << "crosswind " << std::abs(cross) << " kt >= airspeed " << airspeed_kt << " kt on track " << track_deg;
        throw InfeasibleTrackError(os.str());
    }
    return along + std::sqrt(airspeed_kt * airspeed_kt - cross * cross);
}

} // namespace windroute
