#include "windroute/gp.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

#include "windroute/errors.hpp"

namespace windroute {

double kernel_eval(const GeoPoint& a, const GeoPoint& b, const ModelHyperparams& h)
{
    const double dh = chord_distance_nm(a, b) / h.lengthscale_h_nm;
    const double dv = (a.alt_ft - b.alt_ft) / h.lengthscale_v_ft;
    return h.signal_sd_kt * h.signal_sd_kt * std::exp(-0.5 * (dh * dh + dv * dv));
}

Eigen::MatrixXd kernel_matrix(std::span<const GeoPoint> rows, std::span<const GeoPoint> cols,
                              const ModelHyperparams& h)
{
    Eigen::MatrixXd k(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) k(i, j) = kernel_eval(rows[i], cols[j], h);
    }
    return k;
}

Eigen::MatrixXd gram_matrix(std::span<const GeoPoint> sites, const ModelHyperparams& h)
{
    const auto n = static_cast<Eigen::Index>(sites.size());
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = kernel_eval(sites[i], sites[i], h);
        for (Eigen::Index j = 0; j < i; ++j) {
            k(i, j) = kernel_eval(sites[i], sites[j], h);
            k(j, i) = k(i, j);
        }
    }
    return k;
}

MergedStations merge_duplicate_sites(std::span<const StationObservation> stations)
{
    MergedStations out;
    std::map<std::tuple<double, double, double>, std::size_t> index;
    for (const auto& s : stations) {
        const auto key = std::make_tuple(s.site.lat_deg, s.site.lon_deg, s.site.alt_ft);
        auto [it, inserted] = index.emplace(key, out.sites.size());
        if (inserted) {
            out.sites.push_back(s.site);
            out.wind.push_back(s.wind);
            out.weight.push_back(1.0);
        } else {
            const std::size_t k = it->second;
            const double w = out.weight[k];
            out.wind[k] = (out.wind[k] * w + s.wind) * (1.0 / (w + 1.0));
            out.weight[k] = w + 1.0;
        }
    }
    return out;
}

Eigen::LLT<Eigen::MatrixXd> checked_cholesky(const Eigen::MatrixXd& cov, std::span<const GeoPoint> sites,
                                             const char* context)
{
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success && llt.rcond() >= 1e-12) return llt;

    std::size_t best_a = 0;
    std::size_t best_b = cov.rows() > 1 ? 1 : 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < cov.rows(); ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
            const double denom = std::sqrt(std::abs(cov(i, i) * cov(j, j)));
            const double rho = denom > 0.0 ? std::abs(cov(i, j)) / denom : 0.0;
            if (rho > best) {
                best = rho;
                best_a = static_cast<std::size_t>(j);
                best_b = static_cast<std::size_t>(i);
            }
        }
    }
    std::ostringstream os;
    os << context << ": covariance is ill-conditioned";
    if (best_a < sites.size() && best_b < sites.size()) {
        os << "; most correlated sites #" << best_a << " (" << sites[best_a].lat_deg << ", "
           << sites[best_a].lon_deg << ") and #" << best_b << " (" << sites[best_b].lat_deg << ", "
           << sites[best_b].lon_deg << "), correlation " << best;
    }
    throw IllConditionedError(os.str(), best_a, best_b);
}

GpRegression::GpRegression(std::span<const StationObservation> stations, const ModelHyperparams& h,
                           GpOptions opts)
    : h_(h), opts_(std::move(opts)), data_(merge_duplicate_sites(stations))
{
    h_.validate();
    if (data_.sites.empty()) throw InputError("gp_regress: at least one station is required");

    const auto n = static_cast<Eigen::Index>(data_.sites.size());
    Eigen::MatrixXd cov = gram_matrix(data_.sites, h_);
    const double noise = h_.station_noise_sd_kt * h_.station_noise_sd_kt;
    Eigen::VectorXd yu(n), yv(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        cov(i, i) += h_.jitter + noise / data_.weight[i];
        WindVector y = data_.wind[i];
        if (opts_.prior_mean) y = y - opts_.prior_mean(data_.sites[i]);
        yu(i) = y.u_kt;
        yv(i) = y.v_kt;
    }
    chol_ = checked_cholesky(cov, data_.sites, "gp_regress");
    alpha_u_ = chol_.solve(yu);
    alpha_v_ = chol_.solve(yv);
}

WindVector GpRegression::predict_mean(const GeoPoint& query) const
{
    WindVector m{0.0, 0.0};
    for (std::size_t i = 0; i < data_.sites.size(); ++i) {
        const double k = kernel_eval(query, data_.sites[i], h_);
        m.u_kt += k * alpha_u_(static_cast<Eigen::Index>(i));
        m.v_kt += k * alpha_v_(static_cast<Eigen::Index>(i));
    }
    if (opts_.prior_mean) m = m + opts_.prior_mean(query);
    return m;
}

WindPosterior GpRegression::predict(std::span<const GeoPoint> queries) const
{
    WindPosterior post;
    post.sites.assign(queries.begin(), queries.end());
    post.mean.reserve(queries.size());
    post.sd.reserve(queries.size());
    if (queries.empty()) return post;

    const Eigen::MatrixXd kqs = kernel_matrix(queries, data_.sites, h_);
    const Eigen::VectorXd mu = kqs * alpha_u_;
    const Eigen::VectorXd mv = kqs * alpha_v_;
    // v = L^-1 k_*, var = k** - |v|^2
    const Eigen::MatrixXd v = chol_.matrixL().solve(kqs.transpose());
    const double prior_var = h_.signal_sd_kt * h_.signal_sd_kt;
    const double extra = opts_.include_observation_noise ? h_.station_noise_sd_kt * h_.station_noise_sd_kt : 0.0;
    for (std::size_t q = 0; q < queries.size(); ++q) {
        const auto qi = static_cast<Eigen::Index>(q);
        WindVector m{mu(qi), mv(qi)};
        if (opts_.prior_mean) m = m + opts_.prior_mean(queries[q]);
        post.mean.push_back(m);
        const double var = std::max(0.0, prior_var - v.col(qi).squaredNorm()) + extra;
        const double sd = std::sqrt(var);
        post.sd.push_back(ComponentSd{sd, sd});
    }
    return post;
}

WindPosterior gp_regress(std::span<const StationObservation> stations, std::span<const GeoPoint> queries,
                         const ModelHyperparams& h, const GpOptions& opts)
{
    return GpRegression(stations, h, opts).predict(queries);
}

} // namespace windroute
