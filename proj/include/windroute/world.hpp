#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "windroute/wind.hpp"

namespace windroute {

inline constexpr double kMaxTruthWindKt = 250.0;

/// Deterministic wind field used as ground truth by the simulator and the
/// synthetic benchmarks. A field is a sum of components; the total is
/// clamped to kMaxTruthWindKt in magnitude.
class GroundTruthWindField {
public:
    using Component = std::function<WindVector(const GeoPoint&)>;

    static GroundTruthWindField calm();
    static GroundTruthWindField uniform(const WindVector& wind);

    /// Band of wind blowing along the great circle from `from` toward `to`,
    /// with a Gaussian cross-track profile of sd `width_nm` and peak
    /// `core_speed_kt` on the centre line. width_nm <= 0 gives a band of
    /// unlimited width, i.e. a uniform wind aligned with the route.
    static GroundTruthWindField jet(const GeoPoint& from, const GeoPoint& to, double core_speed_kt, double width_nm);

    /// Posterior mean of a GP conditioned on station reports.
    static GroundTruthWindField from_stations(std::span<const StationObservation> stations,
                                              const ModelHyperparams& h);

    /// Seeded zero-mean GP sample, realised on a lat/lon grid covering the box
    /// [south_west, north_east] at roughly `spacing_nm` and interpolated between
    /// nodes by the noise-free GP mean. The field ignores altitude.
    static GroundTruthWindField gp_sample(const GeoPoint& south_west, const GeoPoint& north_east, double spacing_nm,
                                          const ModelHyperparams& h, std::uint64_t seed);

    GroundTruthWindField& add(const GroundTruthWindField& other);

    WindVector at(const GeoPoint& p) const;

    const std::string& description() const { return description_; }

private:
    std::vector<Component> parts_;
    std::string description_;
};

} // namespace windroute
