#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "windroute/wind.hpp"

namespace windroute {

/// Squared-exponential covariance over (chord distance / lengthscale_h_nm,
/// altitude difference / lengthscale_v_ft), in kt^2. Shared by both wind
/// components.
double kernel_eval(const GeoPoint& a, const GeoPoint& b, const ModelHyperparams& h);

Eigen::MatrixXd kernel_matrix(std::span<const GeoPoint> rows, std::span<const GeoPoint> cols,
                              const ModelHyperparams& h);

/// Symmetric Gram matrix of `sites` with itself.
Eigen::MatrixXd gram_matrix(std::span<const GeoPoint> sites, const ModelHyperparams& h);

using PriorMean = std::function<WindVector(const GeoPoint&)>;

struct GpOptions {
    /// Prior mean field; zero when empty.
    PriorMean prior_mean;
    /// Report the sd of a fresh noisy observation at the query (adds the
    /// station noise variance) instead of the sd of the latent wind.
    bool include_observation_noise = false;
};

/// Stations after merging exact duplicate locations. `weight` counts the
/// merged reports; the merged noise variance is sigma^2 / weight.
struct MergedStations {
    std::vector<GeoPoint> sites;
    std::vector<WindVector> wind;
    std::vector<double> weight;
};

MergedStations merge_duplicate_sites(std::span<const StationObservation> stations);

/// Cholesky factor of a covariance matrix. On failure (or a reciprocal
/// condition estimate below 1e-12) throws IllConditionedError naming the most
/// strongly correlated pair of `sites`.
Eigen::LLT<Eigen::MatrixXd> checked_cholesky(const Eigen::MatrixXd& cov, std::span<const GeoPoint> sites,
                                             const char* context);

/// Closed-form GP regression of station winds, independent per component.
class GpRegression {
public:
    GpRegression(std::span<const StationObservation> stations, const ModelHyperparams& h, GpOptions opts = {});

    WindPosterior predict(std::span<const GeoPoint> queries) const;
    WindVector predict_mean(const GeoPoint& query) const;

    const MergedStations& data() const { return data_; }
    const ModelHyperparams& hyperparams() const { return h_; }

private:
    ModelHyperparams h_;
    GpOptions opts_;
    MergedStations data_;
    Eigen::LLT<Eigen::MatrixXd> chol_;
    Eigen::VectorXd alpha_u_;
    Eigen::VectorXd alpha_v_;
};

/// GP regression baseline: posterior of the latent wind at `queries` given
/// station reports only. Requires at least one station.
WindPosterior gp_regress(std::span<const StationObservation> stations, std::span<const GeoPoint> queries,
                         const ModelHyperparams& h, const GpOptions& opts = {});

} // namespace windroute
