#pragma once

// Station/aircraft wind fusion.
//
// The latent state is the wind W at every distinct site (stations and
// aircraft positions) plus the wind T_A actually encountered by each
// aircraft. The unnormalized negative log posterior is
//
//   E = 1/2 sum_c (W_c - m_c)^T K^-1 (W_c - m_c)          GP prior, c in {u, v}
//     + sum_{stations} |t_i - w_i|^2 / (2 sigma^2)         station likelihood
//     + sum_{aircraft} |t_j - w_j|^2 / (2 sigma^2)         aircraft wind vs field
//     + sum_{aircraft} beta (|v_j - t_j| - a_j)^2           wind-triangle potential
//
// where v_j is the reported ground velocity and a_j the true airspeed.
// The last term is a ring around v_j and is not convex in t_j.
//
// Latent vectors use the layout [W_u (N), W_v (N), T_u (n_a), T_v (n_a)].

#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "windroute/gp.hpp"
#include "windroute/wind.hpp"

namespace windroute {

struct FuseOptions {
    double tol = 1e-6; ///< gradient norm at the mode, energy per kt
    int max_newton_iterations = 100;
    double backtrack_factor = 0.5;
    double armijo_c = 1e-4;
    int fallback_gradient_steps = 500;
    /// Additional Newton starts. Start 0 places T_A at the station-only GP
    /// mean; start 1 at the track-aligned estimate v - a * v/|v|.
    int extra_starts = 1;
    /// Propagate the full 2x2 per-site Laplace precision (cross-component
    /// terms included) to query variances instead of its diagonal.
    bool full_covariance = false;
    bool include_observation_noise = false;
    PriorMean prior_mean;
};

class FusionProblem {
public:
    FusionProblem(std::span<const StationObservation> stations, std::span<const AircraftReport> aircraft,
                  const ModelHyperparams& h, PriorMean prior_mean = {});

    std::size_t site_count() const { return sites_.size(); }
    std::size_t aircraft_count() const { return aircraft_.size(); }
    std::size_t latent_size() const { return 2 * sites_.size() + 2 * aircraft_.size(); }

    const std::vector<GeoPoint>& sites() const { return sites_; }
    const ModelHyperparams& hyperparams() const { return h_; }
    /// Site index of aircraft report j.
    std::size_t aircraft_site(std::size_t j) const { return aircraft_site_[j]; }
    /// Station-only GP mean at every site; the default Newton start.
    const std::vector<WindVector>& station_gp_mean() const { return station_gp_mean_; }

    double energy(const Eigen::VectorXd& latent) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& latent) const;

    /// Likelihood part of E (everything but the GP prior) with its gradient
    /// and, optionally, its Hessian, all in the latent layout.
    double likelihood_terms(const Eigen::VectorXd& latent, Eigen::VectorXd* grad, Eigen::MatrixXd* hess) const;

    /// Newton starting points (see FuseOptions::extra_starts).
    Eigen::VectorXd initial_latent(int start) const;

    /// Per-site 2x2 precision the data contribute to W once T_A is
    /// marginalized at `latent`, clamped to be positive semidefinite.
    std::vector<Eigen::Matrix2d> site_precision(const Eigen::VectorXd& latent) const;

    const Eigen::LLT<Eigen::MatrixXd>& prior_cholesky() const { return chol_; }
    const Eigen::VectorXd& prior_mean_u() const { return mean_u_; }
    const Eigen::VectorXd& prior_mean_v() const { return mean_v_; }

private:
    struct StationTerm {
        std::size_t site;
        WindVector wind;
        double precision;
    };
    struct AircraftTerm {
        WindVector ground_velocity;
        double airspeed;
    };

    ModelHyperparams h_;
    PriorMean prior_mean_;
    std::vector<GeoPoint> sites_;
    std::vector<StationTerm> stations_;
    std::vector<AircraftTerm> aircraft_;
    std::vector<std::size_t> aircraft_site_;
    std::vector<WindVector> station_gp_mean_;
    Eigen::LLT<Eigen::MatrixXd> chol_; // of K + jitter I over sites_
    Eigen::VectorXd mean_u_;
    Eigen::VectorXd mean_v_;
};

/// Energy E at `latent` (see file comment).
double neg_log_posterior(const FusionProblem& problem, const Eigen::VectorXd& latent);

struct LaplaceMode {
    Eigen::VectorXd latent;
    /// The same point in whitened coordinates [L^-1 (W - m), T_A].
    Eigen::VectorXd whitened;
    double energy = 0.0;
    double gradient_norm = 0.0;
    int newton_iterations = 0;
    int gradient_steps = 0;
    int start = 0;
};

/// Finds a local mode of E by damped Newton with Armijo backtracking,
/// falling back to gradient descent, from each configured start; keeps the
/// lowest-energy mode. Throws ConvergenceError or SaddlePointError.
LaplaceMode find_mode(const FusionProblem& problem, const FuseOptions& opts);

/// Laplace-approximate posterior of the latent wind field.
class LaplaceFit {
public:
    LaplaceFit(std::span<const StationObservation> stations, std::span<const AircraftReport> aircraft,
               const ModelHyperparams& h, FuseOptions opts = {});

    const FusionProblem& problem() const { return problem_; }
    const LaplaceMode& mode() const { return mode_; }
    /// Encountered wind T_A of aircraft j at the mode.
    WindVector aircraft_wind(std::size_t j) const;
    /// Latent wind W at site i at the mode.
    WindVector site_wind(std::size_t i) const;

    WindPosterior predict(std::span<const GeoPoint> queries) const;

private:
    FuseOptions opts_;
    FusionProblem problem_;
    LaplaceMode mode_;
    Eigen::VectorXd weights_u_; // K^-1 (W_u - m_u) at the mode
    Eigen::VectorXd weights_v_;
    Eigen::MatrixXd precision_sqrt_; // S, 2N x 2N
    Eigen::LLT<Eigen::MatrixXd> b_chol_; // of I + S Kbar S
};

/// Fused posterior at `queries`. Requires at least one station; the aircraft
/// list may be empty, in which case the result matches gp_regress.
WindPosterior laplace_fuse(std::span<const StationObservation> stations, std::span<const AircraftReport> aircraft,
                           std::span<const GeoPoint> queries, const ModelHyperparams& h,
                           const FuseOptions& opts = {});

} // namespace windroute
