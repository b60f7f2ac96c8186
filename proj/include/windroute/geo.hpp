#pragma once

// Spherical-earth navigation primitives. Distances in nautical miles,
// angles in degrees, bearings clockwise from true north.

namespace windroute {

inline constexpr double kEarthRadiusNm = 3440.065;
inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle to [0, 360).
double wrap360(double deg);
/// Wraps an angle to [-180, 180).
double wrap180(double deg);

struct GeoPoint {
    double lat_deg = 0.0;
    double lon_deg = 0.0;
    double alt_ft = 0.0;

    /// Validates and normalizes (longitude wrapped to [-180, 180)).
    /// Throws InputError on non-finite values, |lat| > 90 or negative altitude.
    static GeoPoint make(double lat_deg, double lon_deg, double alt_ft = 0.0);

    bool same_position(const GeoPoint& other) const {
        return lat_deg == other.lat_deg && lon_deg == other.lon_deg;
    }
};

/// Haversine great-circle distance; altitude ignored.
double great_circle_distance_nm(const GeoPoint& a, const GeoPoint& b);

/// Straight-line (through the earth) distance between the surface points.
/// Used by the covariance kernel because it keeps squared-exponential Gram
/// matrices positive semidefinite on the sphere; it agrees with the
/// great-circle distance to a relative 1e-3 below 550 nm.
double chord_distance_nm(const GeoPoint& a, const GeoPoint& b);

/// Initial great-circle course from a to b in [0, 360).
/// Throws InputError when a and b coincide.
double initial_bearing_deg(const GeoPoint& a, const GeoPoint& b);

/// Course on arrival at b when flying the great circle from a.
double final_bearing_deg(const GeoPoint& a, const GeoPoint& b);

/// Destination after flying distance_nm along the great circle that leaves
/// `a` on `bearing_deg`. Altitude is carried over from `a`.
GeoPoint project_nm(const GeoPoint& a, double bearing_deg, double distance_nm);

/// Point at fraction f in [0, 1] along the great circle from a to b.
GeoPoint interpolate(const GeoPoint& a, const GeoPoint& b, double f);

/// Signed distance of p from the great circle through a and b (positive to
/// the right of the a->b direction).
double cross_track_nm(const GeoPoint& a, const GeoPoint& b, const GeoPoint& p);

/// Distance from a to the foot of the perpendicular from p onto the great
/// circle through a and b (negative when the foot lies behind a).
double along_track_nm(const GeoPoint& a, const GeoPoint& b, const GeoPoint& p);

/// East/north offsets in a local tangent plane (equirectangular about ref).
/// Relative distance distortion stays below 2% for extents under 1500 nm
/// at mid latitudes; used for plotting and synthetic grids, not for kernels.
struct LocalOffset {
    double east_nm = 0.0;
    double north_nm = 0.0;
};

LocalOffset to_local_nm(const GeoPoint& ref, const GeoPoint& p);
GeoPoint from_local_nm(const GeoPoint& ref, const LocalOffset& offset);

} // namespace windroute
