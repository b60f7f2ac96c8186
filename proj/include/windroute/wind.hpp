#pragma once

#include <string>
#include <vector>

#include "windroute/geo.hpp"

namespace windroute {

/// Horizontal wind, knots. u is the eastward and v the northward component
/// of the air-mass velocity (the direction the wind blows TOWARD).
struct WindVector {
    double u_kt = 0.0;
    double v_kt = 0.0;

    /// Validated constructor: finite components, each below 500 kt in magnitude.
    static WindVector make(double u_kt, double v_kt);

    /// From meteorological direction (where the wind blows FROM) and speed.
    static WindVector from_direction(double direction_from_deg, double speed_kt);

    double speed() const;
    /// Direction the wind blows FROM, in [0, 360). Zero for calm.
    double direction_from_deg() const;

    WindVector operator+(const WindVector& o) const { return {u_kt + o.u_kt, v_kt + o.v_kt}; }
    WindVector operator-(const WindVector& o) const { return {u_kt - o.u_kt, v_kt - o.v_kt}; }
    WindVector operator*(double s) const { return {u_kt * s, v_kt * s}; }
    bool operator==(const WindVector&) const = default;
};

struct StationObservation {
    GeoPoint site;
    WindVector wind;
};

/// One aircraft position report. `ground_velocity` is the velocity over the
/// ground (east, north) in knots; `airspeed_kt` the reported true airspeed.
struct AircraftReport {
    GeoPoint site;
    WindVector ground_velocity;
    double airspeed_kt = 0.0;
    /// Reports sharing an id are held out together by leave-one-aircraft-out.
    /// Empty ids are treated as distinct aircraft.
    std::string aircraft_id;

    /// Validates airspeed in (0, 700) and ground speed in (0, 900).
    static AircraftReport make(const GeoPoint& site, const WindVector& ground_velocity, double airspeed_kt,
                               std::string aircraft_id = {});

    double ground_speed_kt() const { return ground_velocity.speed(); }
    /// Direction of motion over the ground, [0, 360).
    double track_deg() const;
};

struct ModelHyperparams {
    double lengthscale_h_nm = 250.0;
    double lengthscale_v_ft = 4000.0;
    double signal_sd_kt = 30.0;
    double station_noise_sd_kt = 5.0;
    double aircraft_beta = 0.02; // kt^-2
    double jitter = 1e-4;        // kt^2

    /// Throws ConfigError naming the first violated bound.
    void validate() const;
};

struct ComponentSd {
    double u_kt = 0.0;
    double v_kt = 0.0;
};

/// Posterior over the latent wind at a set of query sites.
struct WindPosterior {
    std::vector<GeoPoint> sites;
    std::vector<WindVector> mean;
    std::vector<ComponentSd> sd;

    std::size_t size() const { return sites.size(); }
};

/// Ground speed achieved when holding `track_deg` over the ground at
/// `airspeed_kt` through `wind`: the along-track wind plus the along-track
/// share of the airspeed left after cancelling the crosswind.
/// Throws InfeasibleTrackError when |crosswind| >= airspeed.
double predict_ground_speed(const WindVector& wind, double track_deg, double airspeed_kt);

/// Along-track and cross-track (positive from the left of the track) wind components.
struct TrackComponents {
    double along_kt;
    double cross_kt;
};
TrackComponents track_components(const WindVector& wind, double track_deg);

} // namespace windroute
