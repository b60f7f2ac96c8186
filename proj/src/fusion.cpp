#include "windroute/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "windroute/errors.hpp"

namespace windroute {

FusionProblem::FusionProblem(std::span<const StationObservation> stations, std::span<const AircraftReport> aircraft,
                             const ModelHyperparams& h, PriorMean prior_mean)
    : h_(h), prior_mean_(std::move(prior_mean))
{
    h_.validate();
    if (stations.empty()) throw InputError("laplace_fuse: at least one station is required to anchor the GP prior");

    const MergedStations merged = merge_duplicate_sites(stations);
    const double noise_var = h_.station_noise_sd_kt * h_.station_noise_sd_kt;
    std::map<std::tuple<double, double, double>, std::size_t> index;
    for (std::size_t i = 0; i < merged.sites.size(); ++i) {
        const auto& s = merged.sites[i];
        index.emplace(std::make_tuple(s.lat_deg, s.lon_deg, s.alt_ft), sites_.size());
        sites_.push_back(s);
        stations_.push_back(StationTerm{i, merged.wind[i], merged.weight[i] / noise_var});
    }
    for (const auto& a : aircraft) {
        const auto key = std::make_tuple(a.site.lat_deg, a.site.lon_deg, a.site.alt_ft);
        auto [it, inserted] = index.emplace(key, sites_.size());
        if (inserted) sites_.push_back(a.site);
        aircraft_site_.push_back(it->second);
        aircraft_.push_back(AircraftTerm{a.ground_velocity, a.airspeed_kt});
    }

    const auto n = static_cast<Eigen::Index>(sites_.size());
    Eigen::MatrixXd k = gram_matrix(sites_, h_);
    k.diagonal().array() += h_.jitter;
    chol_ = checked_cholesky(k, sites_, "laplace_fuse prior");

    mean_u_ = Eigen::VectorXd::Zero(n);
    mean_v_ = Eigen::VectorXd::Zero(n);
    if (prior_mean_) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const WindVector m = prior_mean_(sites_[i]);
            mean_u_(i) = m.u_kt;
            mean_v_(i) = m.v_kt;
        }
    }

    GpOptions gp_opts;
    gp_opts.prior_mean = prior_mean_;
    const GpRegression station_gp(stations, h_, gp_opts);
    station_gp_mean_.reserve(sites_.size());
    for (const auto& s : sites_) station_gp_mean_.push_back(station_gp.predict_mean(s));
}

double FusionProblem::likelihood_terms(const Eigen::VectorXd& z, Eigen::VectorXd* grad, Eigen::MatrixXd* hess) const
{
    const auto n_sites = static_cast<Eigen::Index>(sites_.size());
    const auto n_air = static_cast<Eigen::Index>(aircraft_.size());
    const auto wu = [&](std::size_t i) { return static_cast<Eigen::Index>(i); };
    const auto wv = [&](std::size_t i) { return n_sites + static_cast<Eigen::Index>(i); };
    const auto tu = [&](std::size_t j) { return 2 * n_sites + static_cast<Eigen::Index>(j); };
    const auto tv = [&](std::size_t j) { return 2 * n_sites + n_air + static_cast<Eigen::Index>(j); };

    if (grad) grad->setZero(z.size());
    if (hess) hess->setZero(z.size(), z.size());
    double e = 0.0;

    for (const auto& st : stations_) {
        const double ru = z(wu(st.site)) - st.wind.u_kt;
        const double rv = z(wv(st.site)) - st.wind.v_kt;
        e += 0.5 * st.precision * (ru * ru + rv * rv);
        if (grad) {
            (*grad)(wu(st.site)) += st.precision * ru;
            (*grad)(wv(st.site)) += st.precision * rv;
        }
        if (hess) {
            (*hess)(wu(st.site), wu(st.site)) += st.precision;
            (*hess)(wv(st.site), wv(st.site)) += st.precision;
        }
    }

    const double p = 1.0 / (h_.station_noise_sd_kt * h_.station_noise_sd_kt);
    const double beta = h_.aircraft_beta;
    for (std::size_t j = 0; j < aircraft_.size(); ++j) {
        const std::size_t s = aircraft_site_[j];
        const double t_u = z(tu(j));
        const double t_v = z(tv(j));

        // encountered wind vs the field at the aircraft's site
        const double du = t_u - z(wu(s));
        const double dv = t_v - z(wv(s));
        e += 0.5 * p * (du * du + dv * dv);
        if (grad) {
            (*grad)(tu(j)) += p * du;
            (*grad)(tv(j)) += p * dv;
            (*grad)(wu(s)) -= p * du;
            (*grad)(wv(s)) -= p * dv;
        }
        if (hess) {
            (*hess)(tu(j), tu(j)) += p;
            (*hess)(tv(j), tv(j)) += p;
            (*hess)(wu(s), wu(s)) += p;
            (*hess)(wv(s), wv(s)) += p;
            (*hess)(tu(j), wu(s)) -= p;
            (*hess)(wu(s), tu(j)) -= p;
            (*hess)(tv(j), wv(s)) -= p;
            (*hess)(wv(s), tv(j)) -= p;
        }

        // wind triangle: |v - t| should equal the airspeed
        const auto& ac = aircraft_[j];
        const double qu = t_u - ac.ground_velocity.u_kt;
        const double qv = t_v - ac.ground_velocity.v_kt;
        const double r = std::max(std::hypot(qu, qv), 1e-9);
        const double excess = r - ac.airspeed;
        e += beta * excess * excess;
        const double nu = qu / r;
        const double nv = qv / r;
        if (grad) {
            (*grad)(tu(j)) += 2.0 * beta * excess * nu;
            (*grad)(tv(j)) += 2.0 * beta * excess * nv;
        }
        if (hess) {
            const double tang = excess / r;
            (*hess)(tu(j), tu(j)) += 2.0 * beta * (nu * nu + tang * (1.0 - nu * nu));
            (*hess)(tv(j), tv(j)) += 2.0 * beta * (nv * nv + tang * (1.0 - nv * nv));
            const double off = 2.0 * beta * (nu * nv - tang * nu * nv);
            (*hess)(tu(j), tv(j)) += off;
            (*hess)(tv(j), tu(j)) += off;
        }
    }
    return e;
}

double FusionProblem::energy(const Eigen::VectorXd& z) const
{
    if (static_cast<std::size_t>(z.size()) != latent_size()) throw InputError("neg_log_posterior: latent size mismatch");
    const auto n = static_cast<Eigen::Index>(sites_.size());
    const Eigen::VectorXd xu = chol_.matrixL().solve(z.head(n) - mean_u_);
    const Eigen::VectorXd xv = chol_.matrixL().solve(z.segment(n, n) - mean_v_);
    return 0.5 * (xu.squaredNorm() + xv.squaredNorm()) + likelihood_terms(z, nullptr, nullptr);
}

Eigen::VectorXd FusionProblem::gradient(const Eigen::VectorXd& z) const
{
    if (static_cast<std::size_t>(z.size()) != latent_size()) throw InputError("neg_log_posterior: latent size mismatch");
    const auto n = static_cast<Eigen::Index>(sites_.size());
    Eigen::VectorXd g;
    likelihood_terms(z, &g, nullptr);
    g.head(n) += chol_.solve(z.head(n) - mean_u_);
    g.segment(n, n) += chol_.solve(z.segment(n, n) - mean_v_);
    return g;
}

Eigen::VectorXd FusionProblem::initial_latent(int start) const
{
    const auto n = static_cast<Eigen::Index>(sites_.size());
    const auto na = static_cast<Eigen::Index>(aircraft_.size());
    Eigen::VectorXd z(latent_size());
    for (Eigen::Index i = 0; i < n; ++i) {
        z(i) = station_gp_mean_[i].u_kt;
        z(n + i) = station_gp_mean_[i].v_kt;
    }
    for (Eigen::Index j = 0; j < na; ++j) {
        WindVector t = station_gp_mean_[aircraft_site_[j]];
        if (start >= 1) {
            const auto& ac = aircraft_[j];
            const double gs = ac.ground_velocity.speed();
            t = ac.ground_velocity * (1.0 - ac.airspeed / gs);
        }
        z(2 * n + j) = t.u_kt;
        z(2 * n + na + j) = t.v_kt;
    }
    return z;
}

std::vector<Eigen::Matrix2d> FusionProblem::site_precision(const Eigen::VectorXd& z) const
{
    const auto n = static_cast<Eigen::Index>(sites_.size());
    const auto na = static_cast<Eigen::Index>(aircraft_.size());
    std::vector<Eigen::Matrix2d> lambda(sites_.size(), Eigen::Matrix2d::Zero());
    for (const auto& st : stations_) lambda[st.site] += st.precision * Eigen::Matrix2d::Identity();

    const double p = 1.0 / (h_.station_noise_sd_kt * h_.station_noise_sd_kt);
    const double beta = h_.aircraft_beta;
    for (std::size_t j = 0; j < aircraft_.size(); ++j) {
        const auto& ac = aircraft_[j];
        const double qu = z(2 * n + static_cast<Eigen::Index>(j)) - ac.ground_velocity.u_kt;
        const double qv = z(2 * n + na + static_cast<Eigen::Index>(j)) - ac.ground_velocity.v_kt;
        const double r = std::max(std::hypot(qu, qv), 1e-9);
        const double tang = (r - ac.airspeed) / r;
        const Eigen::Vector2d nrm(qu / r, qv / r);
        const Eigen::Matrix2d radial = nrm * nrm.transpose();
        const Eigen::Matrix2d h_psi = 2.0 * beta * (radial + tang * (Eigen::Matrix2d::Identity() - radial));
        const Eigen::Matrix2d b = p * Eigen::Matrix2d::Identity() + h_psi;
        if (std::abs(b.determinant()) < 1e-300) continue;
        lambda[aircraft_site_[j]] += p * Eigen::Matrix2d::Identity() - p * p * b.inverse();
    }

    for (auto& l : lambda) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(0.5 * (l + l.transpose()));
        const Eigen::Vector2d ev = es.eigenvalues().cwiseMax(0.0);
        l = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    }
    return lambda;
}

double neg_log_posterior(const FusionProblem& problem, const Eigen::VectorXd& latent)
{
    return problem.energy(latent);
}

namespace {

// Newton iterations run in whitened coordinates y = [x_u, x_v, T_u, T_v] with
// W_c = m_c + L x_c, which turns the prior term into |x|^2 / 2 and keeps the
// Hessian I + A^T D A well conditioned.
class WhitenedObjective {
public:
    explicit WhitenedObjective(const FusionProblem& p)
        : p_(p), n_(static_cast<Eigen::Index>(p.site_count())), l_(p.prior_cholesky().matrixL())
    {
    }

    Eigen::VectorXd to_latent(const Eigen::VectorXd& y) const
    {
        Eigen::VectorXd z = y;
        z.head(n_) = p_.prior_mean_u() + l_.triangularView<Eigen::Lower>() * y.head(n_);
        z.segment(n_, n_) = p_.prior_mean_v() + l_.triangularView<Eigen::Lower>() * y.segment(n_, n_);
        return z;
    }

    Eigen::VectorXd from_latent(const Eigen::VectorXd& z) const
    {
        Eigen::VectorXd y = z;
        y.head(n_) = l_.triangularView<Eigen::Lower>().solve(z.head(n_) - p_.prior_mean_u());
        y.segment(n_, n_) = l_.triangularView<Eigen::Lower>().solve(z.segment(n_, n_) - p_.prior_mean_v());
        return y;
    }

    double value(const Eigen::VectorXd& y) const
    {
        return 0.5 * y.head(2 * n_).squaredNorm() + p_.likelihood_terms(to_latent(y), nullptr, nullptr);
    }

    double evaluate(const Eigen::VectorXd& y, Eigen::VectorXd& g, Eigen::MatrixXd* h) const
    {
        const Eigen::VectorXd z = to_latent(y);
        Eigen::VectorXd gl;
        const double e = 0.5 * y.head(2 * n_).squaredNorm() + p_.likelihood_terms(z, &gl, h);
        g = gl;
        const auto lt = l_.transpose().triangularView<Eigen::Upper>();
        g.head(n_) = y.head(n_) + lt * gl.head(n_);
        g.segment(n_, n_) = y.segment(n_, n_) + lt * gl.segment(n_, n_);
        if (h) {
            // H <- A^T D A + I_x with A = blockdiag(L, L, I)
            Eigen::MatrixXd& d = *h;
            for (int c = 0; c < 2; ++c) {
                d.middleCols(c * n_, n_) = d.middleCols(c * n_, n_) * l_.triangularView<Eigen::Lower>();
            }
            for (int c = 0; c < 2; ++c) {
                d.middleRows(c * n_, n_) = lt * d.middleRows(c * n_, n_);
            }
            d.diagonal().head(2 * n_).array() += 1.0;
        }
        return e;
    }

    /// Gradient norm with respect to the original latent (W, T_A).
    double latent_gradient_norm(const Eigen::VectorXd& g) const
    {
        const auto lt = l_.transpose().triangularView<Eigen::Upper>();
        const double gu = lt.solve(g.head(n_)).squaredNorm();
        const double gv = lt.solve(g.segment(n_, n_)).squaredNorm();
        return std::sqrt(gu + gv + g.tail(g.size() - 2 * n_).squaredNorm());
    }

private:
    const FusionProblem& p_;
    Eigen::Index n_;
    Eigen::MatrixXd l_;
};

std::optional<Eigen::VectorXd> solve_shifted(const Eigen::MatrixXd& h, const Eigen::VectorXd& rhs)
{
    Eigen::LLT<Eigen::MatrixXd> llt(h);
    if (llt.info() == Eigen::Success) return llt.solve(rhs);
    double mu = 1e-8 * std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
    for (int k = 0; k < 40; ++k, mu *= 10.0) {
        Eigen::MatrixXd shifted = h;
        shifted.diagonal().array() += mu;
        llt.compute(shifted);
        if (llt.info() == Eigen::Success) return llt.solve(rhs);
    }
    return std::nullopt;
}

struct StartOutcome {
    LaplaceMode mode;
    bool converged = false;
};

StartOutcome run_start(const FusionProblem& problem, const FuseOptions& opts, int start)
{
    const WhitenedObjective obj(problem);
    Eigen::VectorXd y = obj.from_latent(problem.initial_latent(start));
    Eigen::VectorXd g;
    Eigen::MatrixXd h;
    StartOutcome out;
    out.mode.start = start;

    auto newton_phase = [&](int max_iter) -> bool {
        for (int it = 0; it < max_iter; ++it) {
            const double e = obj.evaluate(y, g, &h);
            out.mode.energy = e;
            out.mode.gradient_norm = obj.latent_gradient_norm(g);
            // Always take one Newton step: it is exact on the quadratic
            // (no-aircraft) problem even when the start is already within tol.
            const bool within_tol = out.mode.gradient_norm < opts.tol;
            if (within_tol && it > 0) return true;
            ++out.mode.newton_iterations;

            auto step = solve_shifted(h, -g);
            if (!step) return within_tol;
            double slope = g.dot(*step);
            if (!(slope < 0.0)) {
                *step = -g;
                slope = -g.squaredNorm();
            }
            double alpha = 1.0;
            bool accepted = false;
            for (int ls = 0; ls < 60; ++ls, alpha *= opts.backtrack_factor) {
                const Eigen::VectorXd trial = y + alpha * *step;
                const double et = obj.value(trial);
                if (et <= e + opts.armijo_c * alpha * slope) {
                    y = trial;
                    accepted = true;
                    break;
                }
                // Near the mode the decrease drops below rounding; accept a
                // full step that does not raise the energy beyond it.
                if (ls == 0 && et <= e + 1e-12 * (1.0 + std::abs(e))) {
                    Eigen::VectorXd gt;
                    obj.evaluate(trial, gt, nullptr);
                    if (obj.latent_gradient_norm(gt) < out.mode.gradient_norm) {
                        y = trial;
                        accepted = true;
                        break;
                    }
                }
            }
            if (!accepted) return within_tol;
        }
        const double e = obj.evaluate(y, g, &h);
        out.mode.energy = e;
        out.mode.gradient_norm = obj.latent_gradient_norm(g);
        return out.mode.gradient_norm < opts.tol;
    };

    auto gradient_phase = [&](int steps) -> bool {
        double alpha = 1.0;
        for (int s = 0; s < steps; ++s) {
            const double e = obj.evaluate(y, g, nullptr);
            out.mode.energy = e;
            out.mode.gradient_norm = obj.latent_gradient_norm(g);
            if (out.mode.gradient_norm < opts.tol) return true;
            ++out.mode.gradient_steps;
            const double g2 = g.squaredNorm();
            bool accepted = false;
            for (int ls = 0; ls < 60; ++ls, alpha *= opts.backtrack_factor) {
                const Eigen::VectorXd trial = y - alpha * g;
                if (obj.value(trial) <= e - opts.armijo_c * alpha * g2) {
                    y = trial;
                    accepted = true;
                    break;
                }
            }
            if (!accepted) return false;
            alpha *= 2.0;
        }
        return false;
    };

    bool ok = newton_phase(opts.max_newton_iterations);
    if (!ok) {
        gradient_phase(opts.fallback_gradient_steps);
        ok = newton_phase(opts.max_newton_iterations);
    }
    out.converged = ok;
    out.mode.latent = obj.to_latent(y);
    out.mode.whitened = y;
    if (ok) {
        obj.evaluate(y, g, &h);
        Eigen::LLT<Eigen::MatrixXd> check(h);
        if (check.info() != Eigen::Success) {
            std::ostringstream os;
            os << "laplace_fuse: stationary point from start " << start
               << " has an indefinite Hessian (saddle); try a different initialization";
            throw SaddlePointError(os.str());
        }
    }
    return out;
}

} // namespace

LaplaceMode find_mode(const FusionProblem& problem, const FuseOptions& opts)
{
    const int starts = problem.aircraft_count() == 0 ? 1 : 1 + std::clamp(opts.extra_starts, 0, 1);
    std::optional<LaplaceMode> best;
    std::optional<SaddlePointError> saddle;
    double worst_gradient = 0.0;
    for (int s = 0; s < starts; ++s) {
        try {
            StartOutcome o = run_start(problem, opts, s);
            if (!o.converged) {
                worst_gradient = std::max(worst_gradient, o.mode.gradient_norm);
                continue;
            }
            if (!best || o.mode.energy < best->energy) best = std::move(o.mode);
        } catch (const SaddlePointError& e) {
            if (!saddle) saddle = e;
        }
    }
    if (best) return *best;
    if (saddle) throw *saddle;
    std::ostringstream os;
    os << "laplace_fuse: Newton and gradient fallback did not converge; final gradient norm " << worst_gradient;
    throw ConvergenceError(os.str(), worst_gradient);
}

LaplaceFit::LaplaceFit(std::span<const StationObservation> stations, std::span<const AircraftReport> aircraft,
                       const ModelHyperparams& h, FuseOptions opts)
    : opts_(std::move(opts)), problem_(stations, aircraft, h, opts_.prior_mean), mode_(find_mode(problem_, opts_))
{
    const auto n = static_cast<Eigen::Index>(problem_.site_count());
    const Eigen::VectorXd& y = mode_.whitened;
    const auto lt = problem_.prior_cholesky().matrixU();
    weights_u_ = lt.solve(y.head(n));
    weights_v_ = lt.solve(y.segment(n, n));

    const std::vector<Eigen::Matrix2d> lambda = problem_.site_precision(mode_.latent);
    precision_sqrt_ = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Matrix2d l = lambda[static_cast<std::size_t>(i)];
        if (!opts_.full_covariance) l(0, 1) = l(1, 0) = 0.0;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(l);
        const Eigen::Matrix2d s =
            es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
        precision_sqrt_(i, i) = s(0, 0);
        precision_sqrt_(i, n + i) = s(0, 1);
        precision_sqrt_(n + i, i) = s(1, 0);
        precision_sqrt_(n + i, n + i) = s(1, 1);
    }
    Eigen::MatrixXd kbar = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    Eigen::MatrixXd k = gram_matrix(problem_.sites(), h);
    k.diagonal().array() += h.jitter;
    kbar.topLeftCorner(n, n) = k;
    kbar.bottomRightCorner(n, n) = k;
    Eigen::MatrixXd b = precision_sqrt_ * kbar * precision_sqrt_;
    b.diagonal().array() += 1.0;
    b_chol_.compute(b);
    if (b_chol_.info() != Eigen::Success) throw NumericalError("laplace_fuse: posterior covariance factorization failed");
}

WindVector LaplaceFit::aircraft_wind(std::size_t j) const
{
    const auto n = static_cast<Eigen::Index>(problem_.site_count());
    const auto na = static_cast<Eigen::Index>(problem_.aircraft_count());
    const auto jj = static_cast<Eigen::Index>(j);
    return WindVector{mode_.latent(2 * n + jj), mode_.latent(2 * n + na + jj)};
}

WindVector LaplaceFit::site_wind(std::size_t i) const
{
    const auto n = static_cast<Eigen::Index>(problem_.site_count());
    const auto ii = static_cast<Eigen::Index>(i);
    return WindVector{mode_.latent(ii), mode_.latent(n + ii)};
}

WindPosterior LaplaceFit::predict(std::span<const GeoPoint> queries) const
{
    const auto& h = problem_.hyperparams();
    const auto n = static_cast<Eigen::Index>(problem_.site_count());
    const auto q = static_cast<Eigen::Index>(queries.size());
    WindPosterior post;
    post.sites.assign(queries.begin(), queries.end());
    if (queries.empty()) return post;

    const Eigen::MatrixXd kqs = kernel_matrix(queries, problem_.sites(), h); // q x n
    const Eigen::VectorXd mu = kqs * weights_u_;
    const Eigen::VectorXd mv = kqs * weights_v_;

    // var_c(q) = k(q,q) - |L_B^-1 S kbar_qc|^2
    Eigen::MatrixXd ru = precision_sqrt_.leftCols(n) * kqs.transpose();
    Eigen::MatrixXd rv = precision_sqrt_.rightCols(n) * kqs.transpose();
    b_chol_.matrixL().solveInPlace(ru);
    b_chol_.matrixL().solveInPlace(rv);
    const double prior_var = h.signal_sd_kt * h.signal_sd_kt;
    const double extra = opts_.include_observation_noise ? h.station_noise_sd_kt * h.station_noise_sd_kt : 0.0;

    post.mean.reserve(queries.size());
    post.sd.reserve(queries.size());
    for (Eigen::Index i = 0; i < q; ++i) {
        WindVector m{mu(i), mv(i)};
        if (opts_.prior_mean) m = m + opts_.prior_mean(queries[static_cast<std::size_t>(i)]);
        post.mean.push_back(m);
        const double var_u = std::max(0.0, prior_var - ru.col(i).squaredNorm()) + extra;
        const double var_v = std::max(0.0, prior_var - rv.col(i).squaredNorm()) + extra;
        post.sd.push_back(ComponentSd{std::sqrt(var_u), std::sqrt(var_v)});
    }
    return post;
}

WindPosterior laplace_fuse(std::span<const StationObservation> stations, std::span<const AircraftReport> aircraft,
                           std::span<const GeoPoint> queries, const ModelHyperparams& h, const FuseOptions& opts)
{
    return LaplaceFit(stations, aircraft, h, opts).predict(queries);
}

} // namespace windroute
