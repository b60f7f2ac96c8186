#pragma once

// Winds-aloft (FB) forecast bulletins.
//
// Each station line carries one group per forecast level: "ddff" with an
// optional signed two-digit temperature ("3127+05"). dd is the direction
// the wind blows from in tens of degrees, ff the speed in knots. Speeds of
// 100-199 kt are coded by adding 50 to dd ("7545-10" = 250 deg, 145 kt).
// "9900" is light and variable. At 24,000 ft and above the temperature sign
// is omitted and always negative ("731960" = 230 deg, 119 kt, -60 C).

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "windroute/wind.hpp"

namespace windroute {

enum class FbKind { Missing, Calm, Wind };

struct FbEntry {
    FbKind kind = FbKind::Missing;
    int direction_from_deg = 0; ///< [0, 360), multiple of 10
    int speed_kt = 0;           ///< [0, 199]
    std::optional<int> temp_c;
    /// Decoded from the light-and-variable sentinel.
    bool light_variable = false;

    bool operator==(const FbEntry&) const = default;
};

/// Decodes one group. Blank text is Missing. `level_ft` enables the implied
/// negative temperature form above 24,000 ft; `base_offset` is added to the
/// byte offset reported by ParseError/FormatError.
FbEntry decode_fb_group(std::string_view text, int level_ft = 0, std::size_t base_offset = 0);

/// Canonical group for a wind (direction 0 is written as 36).
/// Throws InputError unless direction is a multiple of 10 in [0, 360) and
/// speed in [0, 199].
std::string encode_fb_group(int direction_from_deg, int speed_kt, std::optional<int> temp_c = std::nullopt,
                            int level_ft = 0);

struct WindsAloftBulletin {
    /// "ddhhmmZ" from the VALID line, empty when absent.
    std::string valid_time;
    std::vector<int> levels_ft;
    /// Station code -> one entry per level.
    std::map<std::string, std::vector<FbEntry>> entries;
    /// Station codes in file order.
    std::vector<std::string> stations;
};

/// Parses the "FT" header and the station lines that follow it. Groups are
/// matched to levels by column alignment, so blank columns (levels below
/// station elevation) decode as Missing.
WindsAloftBulletin parse_fb_bulletin(std::string_view text);

/// Renders a bulletin in the fixed-column layout parse_fb_bulletin reads:
/// a VALID line, the FT header, then one right-aligned group per level.
/// Missing entries are left blank.
std::string format_fb_bulletin(const WindsAloftBulletin& bulletin);

using StationDirectory = std::map<std::string, GeoPoint>;

struct StationObservationSet {
    std::vector<StationObservation> observations;
    std::vector<std::string> station_codes;
    /// Unknown station codes and similar non-fatal findings.
    std::vector<std::string> warnings;
};

struct FbConversionOptions {
    bool include_light_variable = true;
};

/// Station winds at one level as (u, v) vectors, sited at the directory
/// coordinates and the level altitude. Missing entries are skipped.
/// Throws InputError if the level is not in the bulletin.
StationObservationSet fb_to_station_observations(const WindsAloftBulletin& bulletin,
                                                 const StationDirectory& directory, int level_ft,
                                                 const FbConversionOptions& opts = {});

} // namespace windroute
