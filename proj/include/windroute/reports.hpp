#pragma once

#include <istream>
#include <string>
#include <vector>

#include "windroute/fb.hpp"
#include "windroute/wind.hpp"

namespace windroute {

/// Reads a station directory CSV with header `code,lat_deg,lon_deg`.
/// Throws ParseError (line, offset) on malformed rows or duplicate codes.
StationDirectory parse_station_directory(std::istream& in);

struct AircraftRow {
    std::string time_utc;
    std::string aircraft_id;
    double lat_deg = 0.0;
    double lon_deg = 0.0;
    double alt_ft = 0.0;
    double gs_kt = 0.0;
    double track_deg = 0.0;
    double tas_kt = 0.0;
    std::size_t line = 0;
};

struct RejectedRow {
    std::size_t line = 0;
    std::string column;
    std::string message;
};

struct AircraftReportTable {
    std::vector<AircraftRow> rows;
    std::vector<RejectedRow> rejected;

    /// Reports with ground velocity (gs sin track, gs cos track).
    std::vector<AircraftReport> reports() const;
};

struct CsvOptions {
    /// Record out-of-range rows in `rejected` instead of throwing.
    bool skip_invalid_rows = false;
};

/// Column names of the aircraft report CSV, in canonical order.
inline constexpr const char* kAircraftCsvColumns[] = {"time_utc", "aircraft_id", "lat_deg", "lon_deg",
                                                      "alt_ft",   "gs_kt",       "track_deg", "tas_kt"};

/// Reads an aircraft report CSV. The header must name every canonical column
/// (any order; extra columns are ignored). Missing columns and unparseable
/// numbers always throw ParseError; range violations throw unless
/// `skip_invalid_rows` is set.
AircraftReportTable parse_aircraft_csv(std::istream& in, const CsvOptions& opts = {});

} // namespace windroute
