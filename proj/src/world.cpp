#include "windroute/world.hpp"

#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>

#include "windroute/errors.hpp"
#include "windroute/gp.hpp"

namespace windroute {

GroundTruthWindField GroundTruthWindField::calm()
{
    GroundTruthWindField f;
    f.description_ = "calm";
    return f;
}

GroundTruthWindField GroundTruthWindField::uniform(const WindVector& wind)
{
    GroundTruthWindField f;
    f.parts_.push_back([wind](const GeoPoint&) { return wind; });
    std::ostringstream os;
    os << "uniform(" << wind.u_kt << "," << wind.v_kt << ")";
    f.description_ = os.str();
    return f;
}

GroundTruthWindField GroundTruthWindField::jet(const GeoPoint& from, const GeoPoint& to, double core_speed_kt,
                                               double width_nm)
{
    if (from.same_position(to)) throw InputError("jet: anchors must differ");
    const double course0 = initial_bearing_deg(from, to);
    GroundTruthWindField f;
    f.parts_.push_back([from, to, course0, core_speed_kt, width_nm](const GeoPoint& p) {
        const double along = along_track_nm(from, to, p);
        double course = course0;
        if (std::abs(along) > 1e-6) {
            const GeoPoint foot = project_nm(from, course0, along);
            course = along > 0.0 ? final_bearing_deg(from, foot) : initial_bearing_deg(foot, from);
        }
        double speed = core_speed_kt;
        if (width_nm > 0.0) {
            const double xt = cross_track_nm(from, to, p) / width_nm;
            speed *= std::exp(-0.5 * xt * xt);
        }
        const double th = deg2rad(course);
        return WindVector{speed * std::sin(th), speed * std::cos(th)};
    });
    std::ostringstream os;
    os << "jet(" << core_speed_kt << "kt," << width_nm << "nm)";
    f.description_ = os.str();
    return f;
}

GroundTruthWindField GroundTruthWindField::from_stations(std::span<const StationObservation> stations,
                                                         const ModelHyperparams& h)
{
    auto gp = std::make_shared<const GpRegression>(stations, h);
    GroundTruthWindField f;
    f.parts_.push_back([gp](const GeoPoint& p) { return gp->predict_mean(p); });
    f.description_ = "gp-mean(" + std::to_string(stations.size()) + " stations)";
    return f;
}

namespace {

struct GridSample {
    std::vector<GeoPoint> nodes;
    Eigen::VectorXd alpha_u;
    Eigen::VectorXd alpha_v;
    ModelHyperparams h;
};

} // namespace

GroundTruthWindField GroundTruthWindField::gp_sample(const GeoPoint& south_west, const GeoPoint& north_east,
                                                     double spacing_nm, const ModelHyperparams& h,
                                                     std::uint64_t seed)
{
    if (!(spacing_nm > 0.0)) throw InputError("gp_sample: spacing must be > 0");
    const double nm_per_deg = deg2rad(1.0) * kEarthRadiusNm;
    const double lat0 = std::min(south_west.lat_deg, north_east.lat_deg);
    const double lat1 = std::max(south_west.lat_deg, north_east.lat_deg);
    const double lon0 = south_west.lon_deg;
    double lon_span = wrap360(north_east.lon_deg - south_west.lon_deg);
    const double mid_cos = std::cos(deg2rad(0.5 * (lat0 + lat1)));
    const double dlat = spacing_nm / nm_per_deg;
    const double dlon = spacing_nm / (nm_per_deg * std::max(mid_cos, 0.1));
    const int nlat = static_cast<int>(std::ceil((lat1 - lat0) / dlat)) + 1;
    const int nlon = static_cast<int>(std::ceil(lon_span / dlon)) + 1;

    auto sample = std::make_shared<GridSample>();
    sample->h = h;
    for (int i = 0; i < nlat; ++i) {
        for (int j = 0; j < nlon; ++j) {
            sample->nodes.push_back(GeoPoint{std::min(lat0 + i * dlat, 90.0), wrap180(lon0 + j * dlon), 0.0});
        }
    }

    Eigen::MatrixXd k = gram_matrix(sample->nodes, h);
    k.diagonal().array() += 1e-6 * h.signal_sd_kt * h.signal_sd_kt;
    Eigen::LLT<Eigen::MatrixXd> llt(k);
    if (llt.info() != Eigen::Success) throw NumericalError("gp_sample: node covariance is not positive definite");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto n = static_cast<Eigen::Index>(sample->nodes.size());
    Eigen::VectorXd zu(n), zv(n);
    for (Eigen::Index i = 0; i < n; ++i) zu(i) = normal(rng);
    for (Eigen::Index i = 0; i < n; ++i) zv(i) = normal(rng);
    // f = L z, and the interpolation weights (L L^T)^-1 f reduce to L^-T z.
    sample->alpha_u = llt.matrixU().solve(zu);
    sample->alpha_v = llt.matrixU().solve(zv);

    GroundTruthWindField f;
    f.parts_.push_back([sample](const GeoPoint& p) {
        const GeoPoint q{p.lat_deg, p.lon_deg, 0.0};
        WindVector w{0.0, 0.0};
        for (std::size_t i = 0; i < sample->nodes.size(); ++i) {
            const double kq = kernel_eval(q, sample->nodes[i], sample->h);
            w.u_kt += kq * sample->alpha_u(static_cast<Eigen::Index>(i));
            w.v_kt += kq * sample->alpha_v(static_cast<Eigen::Index>(i));
        }
        return w;
    });
    std::ostringstream os;
    os << "gp-sample(seed=" << seed << ",sd=" << h.signal_sd_kt << "kt,l=" << h.lengthscale_h_nm << "nm)";
    f.description_ = os.str();
    return f;
}

GroundTruthWindField& GroundTruthWindField::add(const GroundTruthWindField& other)
{
    parts_.insert(parts_.end(), other.parts_.begin(), other.parts_.end());
    if (description_ == "calm" || description_.empty()) {
        description_ = other.description_;
    } else if (other.description_ != "calm") {
        description_ += "+" + other.description_;
    }
    return *this;
}

WindVector GroundTruthWindField::at(const GeoPoint& p) const
{
    WindVector w{0.0, 0.0};
    for (const auto& part : parts_) w = w + part(p);
    const double s = w.speed();
    if (s > kMaxTruthWindKt) w = w * (kMaxTruthWindKt / s);
    return w;
}

} // namespace windroute
