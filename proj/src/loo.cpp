#include "windroute/loo.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "windroute/errors.hpp"
#include "windroute/gp.hpp"

namespace windroute {

std::string_view to_string(LooMethod m)
{
    switch (m) {
    case LooMethod::NearestNeighbor: return "nearest-neighbor";
    case LooMethod::Gpr: return "gpr";
    case LooMethod::Laplace: return "laplace";
    }
    return "unknown";
}

LooMethod parse_loo_method(std::string_view name)
{
    if (name == "nearest-neighbor" || name == "nn") return LooMethod::NearestNeighbor;
    if (name == "gpr") return LooMethod::Gpr;
    if (name == "laplace") return LooMethod::Laplace;
    throw ConfigError("unknown LOO method '" + std::string(name) + "' (expected nearest-neighbor, gpr or laplace)");
}

namespace {

std::vector<std::vector<std::size_t>> group_by_aircraft(std::span<const AircraftReport> reports)
{
    std::vector<std::vector<std::size_t>> groups;
    std::map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& id = reports[i].aircraft_id;
        if (id.empty()) {
            groups.push_back({i});
            continue;
        }
        auto [it, inserted] = by_id.emplace(id, groups.size());
        if (inserted) groups.emplace_back();
        groups[it->second].push_back(i);
    }
    return groups;
}

WindVector nearest_station_wind(const GeoPoint& p, std::span<const StationObservation> stations)
{
    double best = std::numeric_limits<double>::infinity();
    WindVector w;
    for (const auto& s : stations) {
        const double d = great_circle_distance_nm(p, s.site);
        if (d < best) {
            best = d;
            w = s.wind;
        }
    }
    return w;
}

LooPrediction predict_report(std::size_t index, const AircraftReport& r, const WindVector& wind)
{
    LooPrediction p;
    p.report = index;
    p.observed_gs_kt = r.ground_speed_kt();
    try {
        p.predicted_gs_kt = predict_ground_speed(wind, r.track_deg(), r.airspeed_kt);
    } catch (const InfeasibleTrackError&) {
        p.predicted_gs_kt = track_components(wind, r.track_deg()).along_kt;
        p.clamped = true;
    }
    return p;
}

} // namespace

LooResult loo_ground_speed_rmse(std::span<const AircraftReport> reports, std::span<const StationObservation> stations,
                                LooMethod method, const ModelHyperparams& h, const FuseOptions& opts)
{
    if (reports.size() < 2) throw InputError("loo_ground_speed_rmse: at least two aircraft reports are required");
    if (stations.empty()) throw InputError("loo_ground_speed_rmse: at least one station is required");

    LooResult result;
    result.method = method;
    result.predictions.resize(reports.size());

    switch (method) {
    case LooMethod::NearestNeighbor:
        for (std::size_t i = 0; i < reports.size(); ++i) {
            result.predictions[i] = predict_report(i, reports[i], nearest_station_wind(reports[i].site, stations));
        }
        break;
    case LooMethod::Gpr: {
        const GpRegression gp(stations, h);
        for (std::size_t i = 0; i < reports.size(); ++i) {
            result.predictions[i] = predict_report(i, reports[i], gp.predict_mean(reports[i].site));
        }
        break;
    }
    case LooMethod::Laplace: {
        const auto groups = group_by_aircraft(reports);
        for (std::size_t g = 0; g < groups.size(); ++g) {
            std::vector<AircraftReport> training;
            training.reserve(reports.size());
            std::size_t next = 0;
            for (std::size_t i = 0; i < reports.size(); ++i) {
                if (next < groups[g].size() && groups[g][next] == i) {
                    ++next;
                    continue;
                }
                training.push_back(reports[i]);
            }
            std::vector<GeoPoint> queries;
            for (std::size_t i : groups[g]) queries.push_back(reports[i].site);
            const WindPosterior post = LaplaceFit(stations, training, h, opts).predict(queries);
            for (std::size_t k = 0; k < groups[g].size(); ++k) {
                const std::size_t i = groups[g][k];
                result.predictions[i] = predict_report(i, reports[i], post.mean[k]);
            }
        }
        break;
    }
    }

    double sse = 0.0;
    for (const auto& p : result.predictions) {
        const double e = p.predicted_gs_kt - p.observed_gs_kt;
        sse += e * e;
        if (p.clamped) ++result.flagged;
    }
    result.rmse_kt = std::sqrt(sse / static_cast<double>(reports.size()));
    return result;
}

} // namespace windroute
