#include "dlm/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "dlm/models.hpp"
#include "dlm/numerics.hpp"

namespace {

using dlm::PrecisionComponents;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTargetAcceptance = 0.44;
constexpr double kMinLogSd = -8.0;
constexpr double kMaxLogSd = 3.0;

// Support cap on the log smoothing precisions.  The tau prior is flat along
// its constant direction, so on effectively flat curve segments the whole tau
// level can drift upward without limit; precisions beyond exp(25) ~ 7e10 are
// statistically indistinguishable from infinite smoothing yet eventually make
// the coefficient update's normal equations numerically singular.  Truncating
// the support there keeps the posterior proper and the factorisations sound.
constexpr double kMaxLogSmoothing = 25.0;

void validate_config(const dlm::ChainConfig& cfg) {
    if (cfg.n_iter <= 0) throw std::invalid_argument("ChainConfig: n_iter must be positive");
    if (cfg.burn_in < 0 || cfg.burn_in >= cfg.n_iter) {
        throw std::invalid_argument("ChainConfig: burn_in must lie in [0, n_iter)");
    }
    if (cfg.thin <= 0) throw std::invalid_argument("ChainConfig: thin must be positive");
    if (cfg.proposal_sd <= 0.0) throw std::invalid_argument("ChainConfig: proposal_sd must be positive");
    if (cfg.rho < 0.0) throw std::invalid_argument("ChainConfig: rho must be nonnegative");
}

/// log N(b | 0, Q(exp tau, rho)^{-1}) + log N(tau | 0, zeta2 Khyper^{-1}) up
/// to terms constant in tau; -inf when Q's determinant is unavailable.
double tau_log_target(const Eigen::VectorXd& tau, const Eigen::VectorXd& b,
                      double zeta2, const Eigen::MatrixXd& Khyper, double rho) {
    if ((tau.array() > kMaxLogSmoothing).any()) return kNegInf;
    Eigen::VectorXd lambdas = tau.array().exp();
    if (!lambdas.allFinite() || (lambdas.array() <= 0.0).any()) return kNegInf;
    PrecisionComponents pc{std::move(lambdas), rho};
    dlm::Tridiag t = dlm::build_Q_tridiag(pc);
    auto logdet = dlm::tridiag_logdet(t.diag, t.offdiag);
    if (!logdet) return kNegInf;
    double lp = 0.5 * *logdet - 0.5 * dlm::quad_form(pc, b) -
                0.5 * tau.dot(Khyper * tau) / zeta2;
    return std::isfinite(lp) ? lp : kNegInf;
}

double first_difference_quadform(const Eigen::VectorXd& b) {
    double q = 0.0;
    for (Eigen::Index k = 0; k + 1 < b.size(); ++k) {
        double d = b(k + 1) - b(k);
        q += d * d;
    }
    return q;
}

double increasing_ridge_quadform(const Eigen::VectorXd& b) {
    double q = 0.0;
    for (Eigen::Index k = 0; k < b.size(); ++k) {
        q += (k + 1.0) * b(k) * b(k);
    }
    return q;
}

/// log posterior of (log lambda, log rho) for the two-parameter prior
/// lambda P + rho I with Gamma(1,1) hyper-priors, in the log parameterisation
/// (the +u, +v terms are the change-of-variables Jacobian).
double combo_log_target(double log_lambda, double log_rho, const Eigen::VectorXd& b) {
    const double lambda = std::exp(log_lambda);
    const double rho = std::exp(log_rho);
    if (!std::isfinite(lambda) || lambda <= 0.0 || !std::isfinite(rho) || rho <= 0.0) {
        return kNegInf;
    }
    const Eigen::Index K = b.size();
    Eigen::VectorXd diag = Eigen::VectorXd::Constant(K, 2.0 * lambda + rho);
    diag(0) = lambda + rho;
    diag(K - 1) = lambda + rho;
    Eigen::VectorXd offdiag = Eigen::VectorXd::Constant(K - 1, -lambda);
    auto logdet = dlm::tridiag_logdet(diag, offdiag);
    if (!logdet) return kNegInf;
    double quad = lambda * first_difference_quadform(b) + rho * b.squaredNorm();
    double lp = 0.5 * *logdet - 0.5 * quad + (log_lambda - lambda) + (log_rho - rho);
    return std::isfinite(lp) ? lp : kNegInf;
}

double sorted_quantile(const std::vector<double>& sorted, double prob) {
    const double pos = prob * (sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - lo;
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

} // namespace

namespace dlm {

Eigen::VectorXd update_b(const ChainState& state, const DesignMatrix& X,
                         const Eigen::VectorXd& y, const StructureMatrix& Q,
                         RngStream& rng) {
    if (X.entries.rows() != y.size()) {
        throw std::invalid_argument("update_b: X and y disagree on length");
    }
    if (Q.entries.rows() != X.entries.cols()) {
        throw std::invalid_argument("update_b: Q and X disagree on dimension");
    }
    if (state.sigma2 <= 0.0) throw std::invalid_argument("update_b: sigma2 must be positive");
    Eigen::MatrixXd A = X.entries.transpose() * X.entries / state.sigma2 + Q.entries;
    Eigen::VectorXd linear = X.entries.transpose() * y / state.sigma2;
    return sample_gaussian_precision(rng, A, linear);
}

double update_sigma2(const Eigen::VectorXd& residuals, RngStream& rng) {
    const double m = static_cast<double>(residuals.size());
    return rng.inv_gamma(1.0 + 0.5 * m, 0.5 + 0.5 * residuals.squaredNorm());
}

TauSweepResult update_tau(const Eigen::VectorXd& tau, const Eigen::VectorXd& b,
                          double zeta2, const StructureMatrix& Khyper, double rho,
                          const Eigen::VectorXd& proposal_sd, RngStream& rng) {
    const Eigen::Index m = tau.size();
    if (b.size() != m + 1) {
        throw std::invalid_argument("update_tau: b must have length tau.size() + 1");
    }
    if (Khyper.entries.rows() != m || Khyper.entries.cols() != m) {
        throw std::invalid_argument("update_tau: Khyper must be m x m");
    }
    if (proposal_sd.size() != m) {
        throw std::invalid_argument("update_tau: need one proposal sd per coordinate");
    }
    if (zeta2 <= 0.0) throw std::invalid_argument("update_tau: zeta2 must be positive");

    TauSweepResult out{tau, std::vector<bool>(static_cast<std::size_t>(m), false)};
    double current = tau_log_target(out.tau, b, zeta2, Khyper.entries, rho);
    for (Eigen::Index k = 0; k < m; ++k) {
        Eigen::VectorXd cand = out.tau;
        cand(k) += proposal_sd(k) * rng.normal();
        const double proposed = tau_log_target(cand, b, zeta2, Khyper.entries, rho);
        if (proposed > kNegInf && std::log(rng.uniform_pos()) < proposed - current) {
            out.tau = std::move(cand);
            current = proposed;
            out.accepted[static_cast<std::size_t>(k)] = true;
        }
    }
    return out;
}

double update_zeta2(const Eigen::VectorXd& tau, const StructureMatrix& Khyper,
                    RngStream& rng, int rank) {
    const Eigen::Index m = tau.size();
    if (Khyper.entries.rows() != m || Khyper.entries.cols() != m) {
        throw std::invalid_argument("update_zeta2: Khyper must be m x m");
    }
    if (rank < 0) rank = static_cast<int>(m) - 1;
    const double quad = std::max(0.0, tau.dot(Khyper.entries * tau));
    return rng.inv_gamma(1.0 + 0.5 * rank, 0.5 + 0.5 * quad);
}

SampleCollection run_chain(const Eigen::VectorXd& y, const DesignMatrix& X,
                           const ModelSpec& model, const ChainConfig& cfg) {
    validate_config(cfg);
    if (fit_route(model.id) != FitRoute::Bayesian) {
        throw std::invalid_argument("run_chain: model has no sampler; use fit()");
    }
    const Eigen::Index n = X.entries.rows();
    const Eigen::Index K = X.entries.cols();
    if (y.size() != n) throw std::invalid_argument("run_chain: X and y disagree on length");
    if (K < 2) throw std::invalid_argument("run_chain: need at least two basis functions");

    const PriorKind kind = prior_kind(model);
    if (kind == PriorKind::Adaptive && cfg.rho <= 0.0) {
        // Without corner mass the adaptive precision is singular, so the
        // coefficient prior has no density and every smoothing proposal would
        // be rejected; insist on a proper configuration instead.
        throw std::invalid_argument("run_chain: the adaptive prior needs rho > 0");
    }
    const Eigen::Index n_smooth =
        kind == PriorKind::Adaptive ? K - 1 : kind == PriorKind::Combo ? 2 : 1;
    const Eigen::Index n_mh =
        kind == PriorKind::Adaptive ? K - 1 : kind == PriorKind::Combo ? 2 : 0;

    RngStream rng(cfg.seed);
    const Eigen::MatrixXd xtx = X.entries.transpose() * X.entries;
    const Eigen::VectorXd xty = X.entries.transpose() * y;

    // Hyper-prior structure for the adaptive model's log precisions; a single
    // log precision has no pair to difference, hence the zero matrix.
    StructureMatrix Khyper{Eigen::MatrixXd::Zero(1, 1), StructureKind::K_hyper};
    if (kind == PriorKind::Adaptive && K - 1 >= 2) {
        Khyper = build_K_hyper(static_cast<int>(K) - 1);
    }

    // Smoothing parameters as the sampler carries them: lambda for the
    // conjugate single-lambda priors, tau = log lambda for the adaptive
    // prior, (log lambda, log rho) for the two-parameter prior.
    Eigen::VectorXd sp = Eigen::VectorXd::Zero(n_smooth);
    if (kind == PriorKind::IncreasingRidge || kind == PriorKind::UniformRW1) sp(0) = 1.0;

    auto penalty_at = [&](const Eigen::VectorXd& s) -> Eigen::MatrixXd {
        switch (kind) {
            case PriorKind::IncreasingRidge:
            case PriorKind::UniformRW1:
                return penalty_matrix(kind, static_cast<int>(K), s).entries;
            case PriorKind::Adaptive: {
                Eigen::VectorXd params(K);
                params.head(K - 1) = s.array().exp();
                params(K - 1) = cfg.rho;
                return penalty_matrix(kind, static_cast<int>(K), params).entries;
            }
            case PriorKind::Combo:
                return penalty_matrix(kind, static_cast<int>(K),
                                      s.array().exp().matrix()).entries;
        }
        throw std::logic_error("run_chain: unhandled prior kind");
    };

    Eigen::VectorXd b;
    double sigma2 = 1.0;
    double zeta2 = 1.0;
    try {
        // Penalized least squares at unit smoothing as the starting point
        // (sp is initialized so that every smoothing parameter equals 1).
        b = SpdFactor::compute(xtx + penalty_at(sp)).solve(xty);
    } catch (const NotPositiveDefinite& e) {
        throw NotPositiveDefinite(std::string(e.what()) + " (chain initialization)");
    }
    const double var_y = (y.array() - y.mean()).square().sum() / std::max<Eigen::Index>(n, 1);
    sigma2 = std::max(var_y, 1e-8);

    Eigen::VectorXd log_sd = Eigen::VectorXd::Constant(n_mh, std::log(cfg.proposal_sd));
    Eigen::VectorXd accept_count = Eigen::VectorXd::Zero(n_mh);
    const int kept = (cfg.n_iter - cfg.burn_in + cfg.thin - 1) / cfg.thin;

    SampleCollection out;
    out.b.resize(kept, K);
    out.smoothing.resize(kept, n_smooth);
    out.sigma2.resize(kept);
    out.zeta2.resize(kept);
    out.iterations.reserve(static_cast<std::size_t>(kept));
    out.rho = cfg.rho;

    for (int t = 0; t < cfg.n_iter; ++t) {
        std::vector<bool> accepted(static_cast<std::size_t>(n_mh), false);
        try {
            Eigen::MatrixXd A = xtx / sigma2 + penalty_at(sp);
            b = sample_gaussian_precision(rng, A, xty / sigma2);
            Eigen::VectorXd resid = y - X.entries * b;
            sigma2 = update_sigma2(resid, rng);

            switch (kind) {
                case PriorKind::IncreasingRidge:
                    sp(0) = rng.gamma(1.0 + 0.5 * K, 1.0 + 0.5 * increasing_ridge_quadform(b));
                    break;
                case PriorKind::UniformRW1:
                    sp(0) = rng.gamma(1.0 + 0.5 * (K - 1), 1.0 + 0.5 * first_difference_quadform(b));
                    break;
                case PriorKind::Adaptive: {
                    TauSweepResult sweep = update_tau(sp, b, zeta2, Khyper, cfg.rho,
                                                      log_sd.array().exp(), rng);
                    sp = sweep.tau;
                    accepted = sweep.accepted;
                    zeta2 = update_zeta2(sp, Khyper, rng);
                    break;
                }
                case PriorKind::Combo: {
                    for (int j = 0; j < 2; ++j) {
                        Eigen::VectorXd cand = sp;
                        cand(j) += std::exp(log_sd(j)) * rng.normal();
                        const double lp_cur = combo_log_target(sp(0), sp(1), b);
                        const double lp_new = combo_log_target(cand(0), cand(1), b);
                        if (lp_new > kNegInf &&
                            std::log(rng.uniform_pos()) < lp_new - lp_cur) {
                            sp = cand;
                            accepted[static_cast<std::size_t>(j)] = true;
                        }
                    }
                    break;
                }
            }
        } catch (const NotPositiveDefinite& e) {
            throw NotPositiveDefinite(std::string(e.what()) + " (chain iteration " +
                                      std::to_string(t) + ")");
        }

        if (t < cfg.burn_in) {
            if (cfg.adapt_proposals && n_mh > 0) {
                const double step = std::pow(t + 1.0, -0.6);
                for (Eigen::Index k = 0; k < n_mh; ++k) {
                    const double a = accepted[static_cast<std::size_t>(k)] ? 1.0 : 0.0;
                    log_sd(k) = std::clamp(log_sd(k) + step * (a - kTargetAcceptance),
                                           kMinLogSd, kMaxLogSd);
                }
            }
        } else {
            for (Eigen::Index k = 0; k < n_mh; ++k) {
                if (accepted[static_cast<std::size_t>(k)]) accept_count(k) += 1.0;
            }
            if ((t - cfg.burn_in) % cfg.thin == 0) {
                const Eigen::Index r = (t - cfg.burn_in) / cfg.thin;
                out.b.row(r) = b.transpose();
                out.smoothing.row(r) = sp.transpose();
                out.sigma2(r) = sigma2;
                out.zeta2(r) = kind == PriorKind::Adaptive ? zeta2 : 1.0;
                out.iterations.push_back(t);
            }
        }
    }

    out.acceptance_rates = accept_count / static_cast<double>(cfg.n_iter - cfg.burn_in);
    return out;
}

PosteriorSummary summarize(const SampleCollection& samples, const BasisMatrix& basis,
                           const DesignMatrix& X, const ModelSpec& model) {
    const Eigen::Index n_draws = samples.b.rows();
    if (n_draws == 0) throw std::invalid_argument("summarize: empty sample collection");
    const Eigen::Index K = samples.b.cols();
    if (basis.entries.cols() != K || X.entries.cols() != K) {
        throw std::invalid_argument("summarize: basis/design width must match the draws");
    }

    PosteriorSummary out;
    out.beta_mean = basis.entries * samples.b.colwise().mean().transpose();

    // Pointwise quantiles of the sampled curves basis * b.
    Eigen::MatrixXd curves = samples.b * basis.entries.transpose(); // draws x (p+1)
    const Eigen::Index n_lags = curves.cols();
    out.beta_lower.resize(n_lags);
    out.beta_upper.resize(n_lags);
    std::vector<double> column(static_cast<std::size_t>(n_draws));
    for (Eigen::Index j = 0; j < n_lags; ++j) {
        for (Eigen::Index s = 0; s < n_draws; ++s) column[static_cast<std::size_t>(s)] = curves(s, j);
        std::sort(column.begin(), column.end());
        out.beta_lower(j) = sorted_quantile(column, 0.025);
        out.beta_upper(j) = sorted_quantile(column, 0.975);
    }

    const PriorKind kind = prior_kind(model);
    StructureMatrix shat =
        penalty_matrix(kind, static_cast<int>(K), posterior_mean_params(kind, samples));
    out.ed = effective_dimension(X.entries, shat.entries);
    out.acceptance_rates = samples.acceptance_rates;
    out.sample_count = static_cast<int>(n_draws);
    return out;
}

} // namespace dlm
