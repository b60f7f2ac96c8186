#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "windroute/fusion.hpp"
#include "windroute/wind.hpp"

namespace windroute {

enum class LooMethod { NearestNeighbor, Gpr, Laplace };

std::string_view to_string(LooMethod m);
/// Accepts "nearest-neighbor" (or "nn"), "gpr", "laplace".
LooMethod parse_loo_method(std::string_view name);

struct LooPrediction {
    std::size_t report = 0;
    double observed_gs_kt = 0.0;
    double predicted_gs_kt = 0.0;
    /// Crosswind exceeded airspeed; predicted_gs_kt holds the along-track wind only.
    bool clamped = false;
};

struct LooResult {
    LooMethod method = LooMethod::Laplace;
    double rmse_kt = 0.0;
    std::size_t flagged = 0;
    std::vector<LooPrediction> predictions;
};

/// Leave-one-aircraft-out ground-speed RMSE. Each aircraft (all reports that
/// share an aircraft_id) is held out in turn; its wind is predicted from the
/// stations (nearest-neighbor, gpr) or from the stations plus every other
/// aircraft (laplace), converted to a ground speed along the aircraft's
/// observed track at its reported airspeed, and compared with the observed
/// ground speed.
LooResult loo_ground_speed_rmse(std::span<const AircraftReport> reports, std::span<const StationObservation> stations,
                                LooMethod method, const ModelHyperparams& h, const FuseOptions& opts = {});

} // namespace windroute
