#pragma once

#include <random>

#include <Eigen/LU>
#include <vector>

#include "windroute/gp.hpp"
#include "windroute/wind.hpp"

namespace windroute::testing {

inline GeoPoint random_point(std::mt19937_64& rng, double lat0, double lat1, double lon0, double lon1,
                             double alt_ft = 30000.0)
{
    std::uniform_real_distribution<double> lat(lat0, lat1), lon(lon0, lon1);
    return GeoPoint{lat(rng), lon(rng), alt_ft};
}

inline WindVector random_wind(std::mt19937_64& rng, double sd)
{
    std::normal_distribution<double> n(0.0, sd);
    return WindVector{n(rng), n(rng)};
}

inline std::vector<StationObservation> random_stations(std::mt19937_64& rng, int n, double wind_sd = 30.0)
{
    std::vector<StationObservation> out;
    for (int i = 0; i < n; ++i) out.push_back({random_point(rng, 40.0, 48.0, -125.0, -115.0), random_wind(rng, wind_sd)});
    return out;
}

/// Aircraft flying a random heading at a random airspeed through `wind`,
/// with Gaussian noise on the ground velocity.
inline AircraftReport random_aircraft(std::mt19937_64& rng, const GeoPoint& site, const WindVector& wind,
                                      double noise_sd, const std::string& id)
{
    std::uniform_real_distribution<double> hdg(0.0, 360.0), tas(420.0, 500.0);
    const double h = deg2rad(hdg(rng));
    const double a = tas(rng);
    const WindVector n = random_wind(rng, noise_sd);
    const WindVector v{a * std::sin(h) + wind.u_kt + n.u_kt, a * std::cos(h) + wind.v_kt + n.v_kt};
    return AircraftReport::make(site, v, a, id);
}

/// Profile energy of the one-station/one-aircraft toy at a fixed encountered
/// wind t (W minimized out in closed form, zero prior mean).
inline double profile_energy(const StationObservation& st, const AircraftReport& ac, const WindVector& t,
                                  const ModelHyperparams& h)
{
    Eigen::Matrix2d k;
    k(0, 0) = k(1, 1) = kernel_eval(st.site, st.site, h) + h.jitter;
    k(0, 1) = k(1, 0) = kernel_eval(st.site, ac.site, h);
    const double s2 = h.station_noise_sd_kt * h.station_noise_sd_kt;
    const Eigen::Matrix2d hess = k.inverse() + Eigen::Matrix2d::Identity() / s2;
    double e = 0.0;
    const double obs[2][2] = {{st.wind.u_kt, t.u_kt}, {st.wind.v_kt, t.v_kt}};
    for (const auto& c : obs) {
        const Eigen::Vector2d b(c[0] / s2, c[1] / s2);
        e += (c[0] * c[0] + c[1] * c[1]) / (2.0 * s2) - 0.5 * b.dot(hess.ldlt().solve(b));
    }
    const double r = (ac.ground_velocity - t).speed() - ac.airspeed_kt;
    return e + h.aircraft_beta * r * r;
}

} // namespace windroute::testing
