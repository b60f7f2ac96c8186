#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "windroute/experiment.hpp"
#include "windroute/loo.hpp"

namespace windroute {

/// Writes `content` to a sibling temporary file and renames it over `path`,
/// so readers never observe a partial file. Creates parent directories.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Regular lat/lon grid of query points at one altitude.
struct GridSpec {
    double lat_min_deg = 40.0;
    double lat_max_deg = 50.0;
    double lon_min_deg = -126.0;
    double lon_max_deg = -114.0;
    int nlat = 11;
    int nlon = 13;
    double alt_ft = 30000.0;

    void validate() const;
    /// Row-major nodes, south to north, west to east.
    std::vector<GeoPoint> nodes() const;
};

/// One record per grid node:
/// lat_deg,lon_deg,alt_ft,u_kt,v_kt,sd_u_kt,sd_v_kt,speed_kt,direction_from_deg
/// preceded by a `# method=<label>` comment line.
std::string grid_csv(const WindPosterior& posterior, const std::string& method);

/// GeoJSON FeatureCollection with one downwind arrow (LineString) per node,
/// `nm_per_kt` nautical miles long per knot of wind speed.
std::string grid_geojson(const WindPosterior& posterior, const std::string& method, double nm_per_kt = 0.5);

/// Columns method,rmse_kt,n,flagged.
std::string loo_csv(std::span<const LooResult> results);

/// Columns policy,route,mean_s,sd_s,n,failures.
std::string report_csv(const ExperimentReport& report);

/// Columns route,policy,repetition,slot,seed,ok,total_time_s,error.
std::string runs_csv(const ExperimentReport& report);

/// JSON Lines: a header record followed by one record per waypoint.
std::string flight_log_records(const FlightLog& log, const RunRecord& run);

/// GeoJSON Feature with the flown LineString and run properties.
std::string flight_log_geojson(const FlightLog& log, const RunRecord& run);

} // namespace windroute
