#include "windroute/output.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "windroute/errors.hpp"

namespace windroute {

namespace fs = std::filesystem;
using nlohmann::json;

void write_file_atomic(const fs::path& path, const std::string& content)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot open '" + tmp.string() + "' for writing");
        out << content;
        out.flush();
        if (!out) throw InputError("failed writing '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw InputError("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
    }
}

void GridSpec::validate() const
{
    if (nlat < 1 || nlon < 1) throw ConfigError("grid.nlat and grid.nlon must be >= 1");
    if (lat_min_deg < -90.0 || lat_max_deg > 90.0 || lat_min_deg > lat_max_deg) {
        throw ConfigError("grid latitude bounds must satisfy -90 <= lat_min <= lat_max <= 90");
    }
    if (lon_min_deg < -180.0 || lon_max_deg > 180.0 || lon_min_deg > lon_max_deg) {
        throw ConfigError("grid longitude bounds must satisfy -180 <= lon_min <= lon_max <= 180");
    }
    if (!(alt_ft >= 0.0)) throw ConfigError("grid.alt_ft must be >= 0");
}

std::vector<GeoPoint> GridSpec::nodes() const
{
    std::vector<GeoPoint> out;
    out.reserve(static_cast<std::size_t>(nlat) * nlon);
    for (int i = 0; i < nlat; ++i) {
        const double lat = nlat == 1 ? lat_min_deg : lat_min_deg + (lat_max_deg - lat_min_deg) * i / (nlat - 1);
        for (int j = 0; j < nlon; ++j) {
            const double lon = nlon == 1 ? lon_min_deg : lon_min_deg + (lon_max_deg - lon_min_deg) * j / (nlon - 1);
            out.push_back(GeoPoint{lat, lon, alt_ft});
        }
    }
    return out;
}

namespace {

std::string fixed(double x, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

} // namespace

std::string grid_csv(const WindPosterior& posterior, const std::string& method)
{
    std::ostringstream os;
    os << "# method=" << method << "\n";
    os << "lat_deg,lon_deg,alt_ft,u_kt,v_kt,sd_u_kt,sd_v_kt,speed_kt,direction_from_deg\n";
    for (std::size_t i = 0; i < posterior.size(); ++i) {
        const auto& p = posterior.sites[i];
        const auto& m = posterior.mean[i];
        const auto& s = posterior.sd[i];
        os << fixed(p.lat_deg, 6) << ',' << fixed(p.lon_deg, 6) << ',' << fixed(p.alt_ft, 1) << ','
           << fixed(m.u_kt, 6) << ',' << fixed(m.v_kt, 6) << ',' << fixed(s.u_kt, 6) << ',' << fixed(s.v_kt, 6)
           << ',' << fixed(m.speed(), 6) << ',' << fixed(m.direction_from_deg(), 3) << "\n";
    }
    return os.str();
}

std::string grid_geojson(const WindPosterior& posterior, const std::string& method, double nm_per_kt)
{
    json features = json::array();
    for (std::size_t i = 0; i < posterior.size(); ++i) {
        const auto& p = posterior.sites[i];
        const auto& m = posterior.mean[i];
        const double speed = m.speed();
        GeoPoint tip = p;
        if (speed > 0.0) tip = project_nm(p, wrap360(m.direction_from_deg() + 180.0), speed * nm_per_kt);
        features.push_back({{"type", "Feature"},
                            {"geometry",
                             {{"type", "LineString"},
                              {"coordinates", {{p.lon_deg, p.lat_deg}, {tip.lon_deg, tip.lat_deg}}}}},
                            {"properties",
                             {{"u_kt", m.u_kt},
                              {"v_kt", m.v_kt},
                              {"sd_u_kt", posterior.sd[i].u_kt},
                              {"sd_v_kt", posterior.sd[i].v_kt},
                              {"speed_kt", speed},
                              {"direction_from_deg", m.direction_from_deg()},
                              {"alt_ft", p.alt_ft}}}});
    }
    json fc = {{"type", "FeatureCollection"}, {"properties", {{"method", method}}}, {"features", features}};
    return fc.dump(1) + "\n";
}

std::string loo_csv(std::span<const LooResult> results)
{
    std::ostringstream os;
    os << "method,rmse_kt,n,flagged\n";
    for (const auto& r : results) {
        os << to_string(r.method) << ',' << fixed(r.rmse_kt, 6) << ',' << r.predictions.size() << ',' << r.flagged
           << "\n";
    }
    return os.str();
}

std::string report_csv(const ExperimentReport& report)
{
    std::ostringstream os;
    os << "policy,route,mean_s,sd_s,n,failures\n";
    for (const auto& c : report.cells) {
        os << to_string(c.policy) << ',' << c.route << ',' << fixed(c.mean_s, 3) << ',' << fixed(c.sd_s, 3) << ','
           << c.n << ',' << c.failures << "\n";
    }
    return os.str();
}

namespace {

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

} // namespace

std::string runs_csv(const ExperimentReport& report)
{
    std::ostringstream os;
    os << "route,policy,repetition,slot,seed,ok,total_time_s,error\n";
    for (const auto& r : report.runs) {
        os << r.route << ',' << to_string(r.policy) << ',' << r.repetition << ',' << r.slot << ',' << r.seed << ','
           << (r.ok ? 1 : 0) << ',' << fixed(r.total_time_s, 3) << ',' << csv_field(r.error) << "\n";
    }
    return os.str();
}

std::string flight_log_records(const FlightLog& log, const RunRecord& run)
{
    std::ostringstream os;
    json header = {{"record", "flight"},
                   {"route", run.route},
                   {"policy", to_string(log.policy)},
                   {"slot", run.slot},
                   {"seed", run.seed},
                   {"total_time_s", log.total_time_s},
                   {"legs", log.legs.size()},
                   {"observations", log.observations.size()},
                   {"fallback_steps", log.fallback_steps},
                   {"choices", log.choices}};
    os << header.dump() << "\n";
    for (std::size_t i = 0; i < log.waypoints.size(); ++i) {
        const auto& w = log.waypoints[i];
        json rec = {{"record", "waypoint"},
                    {"index", i},
                    {"lat_deg", w.position.lat_deg},
                    {"lon_deg", w.position.lon_deg},
                    {"elapsed_s", w.elapsed_s}};
        if (i > 0) {
            const auto& leg = log.legs[i - 1];
            rec["course_deg"] = leg.course_deg;
            rec["ground_speed_kt"] = leg.ground_speed_kt;
            rec["wind_u_kt"] = leg.wind.u_kt;
            rec["wind_v_kt"] = leg.wind.v_kt;
        }
        os << rec.dump() << "\n";
    }
    return os.str();
}

std::string flight_log_geojson(const FlightLog& log, const RunRecord& run)
{
    json coords = json::array();
    for (const auto& w : log.waypoints) coords.push_back({w.position.lon_deg, w.position.lat_deg});
    json feature = {{"type", "Feature"},
                    {"geometry", {{"type", "LineString"}, {"coordinates", coords}}},
                    {"properties",
                     {{"route", run.route},
                      {"policy", to_string(log.policy)},
                      {"slot", run.slot},
                      {"seed", run.seed},
                      {"total_time_s", log.total_time_s}}}};
    return feature.dump(1) + "\n";
}

} // namespace windroute
