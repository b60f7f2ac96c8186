#include "windroute/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <random>
#include <string>

#include "windroute/errors.hpp"
#include "windroute/fb.hpp"

namespace windroute {

SyntheticWorld make_synthetic_world(const SyntheticWorldSpec& spec, std::uint64_t seed)
{
    if (spec.station_count < 1) throw InputError("synthetic world needs at least one station");
    if (spec.aircraft_count < 0) throw InputError("synthetic world: negative aircraft count");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> offset(-spec.half_extent_nm, spec.half_extent_nm);
    std::uniform_real_distribution<double> heading(0.0, 360.0);
    std::uniform_real_distribution<double> airspeed(spec.min_airspeed_kt, spec.max_airspeed_kt);
    std::normal_distribution<double> noise(0.0, 1.0);

    const double margin = spec.half_extent_nm + 2.0 * spec.field.lengthscale_h_nm;
    const GeoPoint sw = from_local_nm(spec.center, LocalOffset{-margin, -margin});
    const GeoPoint ne = from_local_nm(spec.center, LocalOffset{margin, margin});

    SyntheticWorld world;
    world.truth = GroundTruthWindField::uniform(spec.mean_wind);
    world.truth.add(GroundTruthWindField::gp_sample(sw, ne, spec.field.lengthscale_h_nm / 2.5, spec.field,
                                                    rng()));

    for (int i = 0; i < spec.station_count; ++i) {
        GeoPoint site = from_local_nm(spec.center, LocalOffset{offset(rng), offset(rng)});
        site.alt_ft = spec.center.alt_ft;
        WindVector w = world.truth.at(site);
        w.u_kt += spec.noise_sd_kt * noise(rng);
        w.v_kt += spec.noise_sd_kt * noise(rng);
        world.stations.push_back(StationObservation{site, w});
    }

    for (int j = 0; j < spec.aircraft_count; ++j) {
        GeoPoint site;
        WindVector wind;
        if (spec.colocated) {
            const auto& st = world.stations[static_cast<std::size_t>(j) % world.stations.size()];
            site = st.site;
            wind = st.wind;
        } else {
            site = from_local_nm(spec.center, LocalOffset{offset(rng), offset(rng)});
            site.alt_ft = spec.center.alt_ft;
            wind = world.truth.at(site);
        }
        const double hdg = heading(rng);
        const double tas = airspeed(rng);
        WindVector gv{tas * std::sin(deg2rad(hdg)) + wind.u_kt, tas * std::cos(deg2rad(hdg)) + wind.v_kt};
        if (!spec.colocated) {
            gv.u_kt += spec.noise_sd_kt * noise(rng);
            gv.v_kt += spec.noise_sd_kt * noise(rng);
        }
        world.aircraft.push_back(AircraftReport::make(site, gv, tas, "AC" + std::to_string(j)));
        world.headings_deg.push_back(hdg);
    }
    return world;
}

std::string synthetic_station_code(std::size_t i)
{
    std::string code(3, 'A');
    for (int k = 2; k >= 0; --k) {
        code[k] = static_cast<char>('A' + i % 26);
        i /= 26;
    }
    return code;
}

SyntheticFiles render_synthetic_world(const SyntheticWorld& world, int level_ft)
{
    SyntheticFiles out;
    WindsAloftBulletin b;
    b.valid_time = "010000Z";
    b.levels_ft = {24000, 30000, 34000, 39000};
    if (std::find(b.levels_ft.begin(), b.levels_ft.end(), level_ft) == b.levels_ft.end()) {
        b.levels_ft.push_back(level_ft);
        std::sort(b.levels_ft.begin(), b.levels_ft.end());
    }

    std::ostringstream dir;
    dir << "code,lat_deg,lon_deg\n";
    char buf[160];
    for (std::size_t i = 0; i < world.stations.size(); ++i) {
        const auto& st = world.stations[i];
        const std::string code = synthetic_station_code(i);
        std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f\n", code.c_str(), st.site.lat_deg, st.site.lon_deg);
        dir << buf;

        FbEntry e;
        const double speed = std::min(st.wind.speed(), 199.0);
        const int kt = static_cast<int>(std::lround(speed));
        if (kt < 5) {
            e.kind = FbKind::Calm;
            e.light_variable = true;
        } else {
            e.kind = FbKind::Wind;
            e.speed_kt = kt;
            e.direction_from_deg = static_cast<int>(std::lround(st.wind.direction_from_deg() / 10.0)) * 10 % 360;
        }
        std::vector<FbEntry> row;
        for (int level : b.levels_ft) {
            FbEntry at = e;
            at.temp_c = std::max(-99, static_cast<int>(std::lround(15.0 - 2.0 * level / 1000.0)));
            row.push_back(at);
        }
        b.entries.emplace(code, std::move(row));
        b.stations.push_back(code);
    }
    out.bulletin = format_fb_bulletin(b);
    out.stations_csv = dir.str();

    std::ostringstream ac;
    ac << "time_utc,aircraft_id,lat_deg,lon_deg,alt_ft,gs_kt,track_deg,tas_kt\n";
    for (std::size_t j = 0; j < world.aircraft.size(); ++j) {
        const auto& r = world.aircraft[j];
        const double gs = r.ground_velocity.speed();
        const double track = wrap360(rad2deg(std::atan2(r.ground_velocity.u_kt, r.ground_velocity.v_kt)));
        std::snprintf(buf, sizeof buf, "2026-01-01T%02zu:%02zu:00Z,%s,%.6f,%.6f,%.0f,%.4f,%.4f,%.4f\n", j / 60 % 24,
                      j % 60, r.aircraft_id.c_str(), r.site.lat_deg, r.site.lon_deg, r.site.alt_ft, gs, track,
                      r.airspeed_kt);
        ac << buf;
    }
    out.aircraft_csv = ac.str();
    return out;
}

} // namespace windroute
