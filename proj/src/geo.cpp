#include "windroute/geo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "windroute/errors.hpp"

namespace windroute {

double wrap360(double deg)
{
    double r = std::fmod(deg, 360.0);
    if (r < 0.0) r += 360.0;
    if (r >= 360.0) r -= 360.0;
    return r + 0.0; // no negative zero
}

double wrap180(double deg)
{
    double r = wrap360(deg + 180.0) - 180.0;
    return r;
}

GeoPoint GeoPoint::make(double lat_deg, double lon_deg, double alt_ft)
{
    if (!std::isfinite(lat_deg) || !std::isfinite(lon_deg) || !std::isfinite(alt_ft)) {
        throw InputError("GeoPoint: non-finite coordinate");
    }
    if (lat_deg < -90.0 || lat_deg > 90.0) {
        std::ostringstream os;
        os << "GeoPoint: latitude " << lat_deg << " outside [-90, 90]";
        throw InputError(os.str());
    }
    if (alt_ft < 0.0) {
        std::ostringstream os;
        os << "GeoPoint: altitude " << alt_ft << " ft is negative";
        throw InputError(os.str());
    }
    return GeoPoint{lat_deg, wrap180(lon_deg), alt_ft};
}

double great_circle_distance_nm(const GeoPoint& a, const GeoPoint& b)
{
    const double phi1 = deg2rad(a.lat_deg);
    const double phi2 = deg2rad(b.lat_deg);
    const double s_dphi = std::sin(0.5 * (phi2 - phi1));
    const double s_dlam = std::sin(0.5 * deg2rad(b.lon_deg - a.lon_deg));
    double h = s_dphi * s_dphi + std::cos(phi1) * std::cos(phi2) * s_dlam * s_dlam;
    h = std::clamp(h, 0.0, 1.0);
    return 2.0 * kEarthRadiusNm * std::asin(std::sqrt(h));
}

double chord_distance_nm(const GeoPoint& a, const GeoPoint& b)
{
    const double central = great_circle_distance_nm(a, b) / kEarthRadiusNm;
    return 2.0 * kEarthRadiusNm * std::sin(0.5 * central);
}

double initial_bearing_deg(const GeoPoint& a, const GeoPoint& b)
{
    if (a.same_position(b)) {
        throw InputError("initial_bearing_deg: coincident points have no bearing");
    }
    const double phi1 = deg2rad(a.lat_deg);
    const double phi2 = deg2rad(b.lat_deg);
    const double dlam = deg2rad(b.lon_deg - a.lon_deg);
    const double y = std::sin(dlam) * std::cos(phi2);
    const double x = std::cos(phi1) * std::sin(phi2) - std::sin(phi1) * std::cos(phi2) * std::cos(dlam);
    return wrap360(rad2deg(std::atan2(y, x)));
}

double final_bearing_deg(const GeoPoint& a, const GeoPoint& b)
{
    return wrap360(initial_bearing_deg(b, a) + 180.0);
}

GeoPoint project_nm(const GeoPoint& a, double bearing_deg, double distance_nm)
{
    if (distance_nm == 0.0) return a;
    const double delta = distance_nm / kEarthRadiusNm;
    const double theta = deg2rad(bearing_deg);
    const double phi1 = deg2rad(a.lat_deg);
    const double lam1 = deg2rad(a.lon_deg);
    const double sin_phi2 =
        std::sin(phi1) * std::cos(delta) + std::cos(phi1) * std::sin(delta) * std::cos(theta);
    const double phi2 = std::asin(std::clamp(sin_phi2, -1.0, 1.0));
    const double lam2 = lam1 + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(phi1),
                                          std::cos(delta) - std::sin(phi1) * sin_phi2);
    return GeoPoint{rad2deg(phi2), wrap180(rad2deg(lam2)), a.alt_ft};
}

GeoPoint interpolate(const GeoPoint& a, const GeoPoint& b, double f)
{
    if (a.same_position(b) || f == 0.0) return a;
    const double d = great_circle_distance_nm(a, b);
    GeoPoint p = project_nm(a, initial_bearing_deg(a, b), f * d);
    p.alt_ft = a.alt_ft + f * (b.alt_ft - a.alt_ft);
    return p;
}

double cross_track_nm(const GeoPoint& a, const GeoPoint& b, const GeoPoint& p)
{
    if (a.same_position(p)) return 0.0;
    const double d13 = great_circle_distance_nm(a, p) / kEarthRadiusNm;
    const double t13 = deg2rad(initial_bearing_deg(a, p));
    const double t12 = deg2rad(initial_bearing_deg(a, b));
    return std::asin(std::clamp(std::sin(d13) * std::sin(t13 - t12), -1.0, 1.0)) * kEarthRadiusNm;
}

double along_track_nm(const GeoPoint& a, const GeoPoint& b, const GeoPoint& p)
{
    if (a.same_position(p)) return 0.0;
    const double d13 = great_circle_distance_nm(a, p) / kEarthRadiusNm;
    const double t13 = deg2rad(initial_bearing_deg(a, p));
    const double t12 = deg2rad(initial_bearing_deg(a, b));
    const double dxt = std::asin(std::clamp(std::sin(d13) * std::sin(t13 - t12), -1.0, 1.0));
    const double c = std::clamp(std::cos(d13) / std::cos(dxt), -1.0, 1.0);
    const double dat = std::acos(c);
    return (std::cos(t13 - t12) < 0.0 ? -dat : dat) * kEarthRadiusNm;
}

LocalOffset to_local_nm(const GeoPoint& ref, const GeoPoint& p)
{
    const double nm_per_deg = deg2rad(1.0) * kEarthRadiusNm;
    return LocalOffset{wrap180(p.lon_deg - ref.lon_deg) * nm_per_deg * std::cos(deg2rad(ref.lat_deg)),
                       (p.lat_deg - ref.lat_deg) * nm_per_deg};
}

GeoPoint from_local_nm(const GeoPoint& ref, const LocalOffset& offset)
{
    const double nm_per_deg = deg2rad(1.0) * kEarthRadiusNm;
    const double lat = std::clamp(ref.lat_deg + offset.north_nm / nm_per_deg, -90.0, 90.0);
    const double lon = ref.lon_deg + offset.east_nm / (nm_per_deg * std::cos(deg2rad(ref.lat_deg)));
    return GeoPoint{lat, wrap180(lon), ref.alt_ft};
}

} // namespace windroute
