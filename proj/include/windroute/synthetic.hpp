#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "windroute/wind.hpp"
#include "windroute/world.hpp"

namespace windroute {

/// Parameters of a seeded station/aircraft benchmark world.
struct SyntheticWorldSpec {
    GeoPoint center = GeoPoint{45.0, -120.0, 30000.0};
    double half_extent_nm = 400.0;
    int station_count = 10;
    int aircraft_count = 30;
    /// Zero-mean Gaussian noise added to station winds and to each component
    /// of the aircraft ground velocity.
    double noise_sd_kt = 5.0;
    /// Hyperparameters of the GP the true field is drawn from.
    ModelHyperparams field;
    WindVector mean_wind{0.0, 0.0};
    double min_airspeed_kt = 420.0;
    double max_airspeed_kt = 500.0;
    /// Place aircraft at station sites, flying in exactly the reported
    /// station wind (a self-consistent world when noise_sd_kt is zero).
    bool colocated = false;
};

struct SyntheticWorld {
    std::vector<StationObservation> stations;
    std::vector<AircraftReport> aircraft;
    GroundTruthWindField truth;
    /// Headings flown through the air mass, one per aircraft.
    std::vector<double> headings_deg;
};

SyntheticWorld make_synthetic_world(const SyntheticWorldSpec& spec, std::uint64_t seed);

/// Text files describing a synthetic world in the ingest formats.
struct SyntheticFiles {
    std::string bulletin;
    std::string stations_csv;
    std::string aircraft_csv;
};

/// Three-letter code of station i: AAA, AAB, ...
std::string synthetic_station_code(std::size_t i);

/// Renders the station winds as an FB bulletin (quantized to 10 degrees and
/// 1 kt; the same wind at every level of {24000, 30000, 34000, 39000} plus
/// `level_ft`), a station directory, and the aircraft report table.
SyntheticFiles render_synthetic_world(const SyntheticWorld& world, int level_ft);

} // namespace windroute
