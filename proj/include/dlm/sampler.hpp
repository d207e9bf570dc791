#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "dlm/basis.hpp"
#include "dlm/penalty.hpp"
#include "dlm/rng.hpp"

namespace dlm {

struct ModelSpec; // models.hpp

/// MCMC run settings shared by all sampled models.
struct ChainConfig {
    int n_iter = 10000;       ///< total iterations
    int burn_in = 2000;       ///< discarded head, < n_iter
    int thin = 1;             ///< keep every thin-th post-burn-in draw
    double proposal_sd = 0.5; ///< initial random-walk sd on the log-precision scale
    double rho = 1.0;         ///< fixed corner mass of the adaptive precision
    std::uint64_t seed = 0;
    bool adapt_proposals = true; ///< Robbins-Monro tuning toward 0.44 during burn-in
};

/// Current position of the chain.
struct ChainState {
    Eigen::VectorXd b;   ///< spline coefficients, length K
    Eigen::VectorXd tau; ///< log smoothing precisions, length K-1
    double sigma2 = 1.0; ///< observation variance
    double zeta2 = 1.0;  ///< hyper-prior variance of tau
};

/// Retained post-burn-in draws.  The smoothing block's meaning depends on the
/// model: the adaptive model stores tau (length K-1), the two-parameter
/// combination model stores (log lambda, log rho), and the conjugate
/// single-lambda models store lambda itself.
struct SampleCollection {
    Eigen::MatrixXd b;         ///< sample_count x K
    Eigen::MatrixXd smoothing; ///< sample_count x (model-dependent width)
    Eigen::VectorXd sigma2;    ///< sample_count
    Eigen::VectorXd zeta2;     ///< sample_count (constant 1 for non-adaptive models)
    Eigen::VectorXd acceptance_rates; ///< post-burn-in MH rate per coordinate; empty for conjugate models
    std::vector<int> iterations;      ///< chain iteration of each retained draw
    double rho = 1.0;                 ///< fixed corner mass the chain ran with
};

/// Posterior lag-curve estimates and fit diagnostics.
struct PosteriorSummary {
    Eigen::VectorXd beta_mean;  ///< length p+1
    Eigen::VectorXd beta_lower; ///< pointwise 2.5% bound
    Eigen::VectorXd beta_upper; ///< pointwise 97.5% bound
    double ed = 0.0;            ///< effective dimension at the posterior-mean penalty
    Eigen::VectorXd acceptance_rates;
    int sample_count = 0;
};

/// Gibbs draw of b from N(A^{-1} X^T y / sigma2, A^{-1}), A = X^T X / sigma2 + Q.
Eigen::VectorXd update_b(const ChainState& state, const DesignMatrix& X,
                         const Eigen::VectorXd& y, const StructureMatrix& Q,
                         RngStream& rng);

/// Gibbs draw of sigma2 from Inverse-Gamma(1 + m/2, 1/2 + RSS/2).
double update_sigma2(const Eigen::VectorXd& residuals, RngStream& rng);

struct TauSweepResult {
    Eigen::VectorXd tau;
    std::vector<bool> accepted; ///< per-coordinate outcome of this sweep
};

/// One Metropolis-Hastings sweep over the log smoothing precisions.  Each
/// coordinate gets a Gaussian random-walk proposal judged against
/// log N(b | 0, Q(exp tau, rho)^{-1}) + log N(tau | 0, zeta2 Khyper^{-1});
/// a failed determinant during a proposal counts as rejection.
TauSweepResult update_tau(const Eigen::VectorXd& tau, const Eigen::VectorXd& b,
                          double zeta2, const StructureMatrix& Khyper, double rho,
                          const Eigen::VectorXd& proposal_sd, RngStream& rng);

/// Gibbs draw of zeta2 from Inverse-Gamma(1 + rank/2, 1/2 + tau^T Khyper tau / 2).
/// rank defaults to tau.size() - 1, the rank of the first-difference structure
/// matrix; pass the full size when Khyper has been regularised to full rank.
double update_zeta2(const Eigen::VectorXd& tau, const StructureMatrix& Khyper,
                    RngStream& rng, int rank = -1);

/// Runs the model's full MCMC (Gibbs for b, sigma2 and the conjugate
/// single-lambda priors; Metropolis-Hastings for the log-scale smoothing
/// parameters) and returns the thinned post-burn-in draws.  Deterministic
/// given cfg.seed.  Rethrows NotPositiveDefinite with the iteration attached.
SampleCollection run_chain(const Eigen::VectorXd& y, const DesignMatrix& X,
                           const ModelSpec& model, const ChainConfig& cfg);

/// Lag-curve posterior means, pointwise 95% bands, and the effective
/// dimension at the posterior-mean penalty of the model.
PosteriorSummary summarize(const SampleCollection& samples, const BasisMatrix& basis,
                           const DesignMatrix& X, const ModelSpec& model);

} // namespace dlm
