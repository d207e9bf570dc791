#include "dlm/models.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "dlm/numerics.hpp"

namespace dlm {

FitRoute fit_route(ModelId id) {
    return id == ModelId::M5 ? FitRoute::AicLeastSquares : FitRoute::Bayesian;
}

KnotPlacement knot_placement(ModelId id) {
    return id == ModelId::M5 ? KnotPlacement::Logarithmic : KnotPlacement::Uniform;
}

PriorKind prior_kind(const ModelSpec& spec) {
    const bool swapped = spec.assignment == PenaltyAssignment::Swapped;
    switch (spec.id) {
        case ModelId::M1:
            return swapped ? PriorKind::UniformRW1 : PriorKind::IncreasingRidge;
        case ModelId::M2:
            return swapped ? PriorKind::IncreasingRidge : PriorKind::UniformRW1;
        case ModelId::M3:
            return PriorKind::Adaptive;
        case ModelId::M4:
            return PriorKind::Combo;
        case ModelId::M5:
            break;
    }
    throw std::invalid_argument("prior_kind: the least-squares model has no sampling prior");
}

StructureMatrix penalty_matrix(PriorKind kind, int K, const Eigen::VectorXd& params) {
    switch (kind) {
        case PriorKind::IncreasingRidge:
            if (params.size() != 1) {
                throw std::invalid_argument("penalty_matrix: ridge takes one parameter");
            }
            return build_ridge_diag(K, params(0));
        case PriorKind::UniformRW1: {
            if (params.size() != 1) {
                throw std::invalid_argument("penalty_matrix: first-difference prior takes one parameter");
            }
            if (params(0) <= 0.0) {
                throw std::invalid_argument("penalty_matrix: lambda must be positive");
            }
            return {params(0) * build_P(K).entries, StructureKind::P_rw1};
        }
        case PriorKind::Adaptive: {
            if (params.size() != K) {
                throw std::invalid_argument(
                    "penalty_matrix: adaptive prior takes K-1 lambdas plus rho");
            }
            return build_Q({params.head(K - 1), params(K - 1)});
        }
        case PriorKind::Combo:
            if (params.size() != 2) {
                throw std::invalid_argument("penalty_matrix: combination prior takes (lambda, rho)");
            }
            return build_pspline_combo(K, params(0), params(1));
    }
    throw std::logic_error("penalty_matrix: unhandled prior kind");
}

Eigen::VectorXd posterior_mean_params(PriorKind kind, const SampleCollection& samples) {
    if (samples.smoothing.rows() == 0) {
        throw std::invalid_argument("posterior_mean_params: empty sample collection");
    }
    switch (kind) {
        case PriorKind::IncreasingRidge:
        case PriorKind::UniformRW1: {
            Eigen::VectorXd params(1);
            params(0) = samples.smoothing.col(0).mean();
            return params;
        }
        case PriorKind::Adaptive: {
            const Eigen::Index m = samples.smoothing.cols();
            Eigen::VectorXd params(m + 1);
            params.head(m) = samples.smoothing.array().exp().colwise().mean();
            params(m) = samples.rho;
            return params;
        }
        case PriorKind::Combo:
            return samples.smoothing.array().exp().colwise().mean();
    }
    throw std::logic_error("posterior_mean_params: unhandled prior kind");
}

double aic(double rss, int m, int k_params) {
    if (m <= 0) throw std::invalid_argument("aic: observation count must be positive");
    if (rss < 0.0) throw std::invalid_argument("aic: rss must be nonnegative");
    if (rss == 0.0) return -std::numeric_limits<double>::infinity();
    return m * std::log(rss / m) + 2.0 * k_params;
}

namespace {

FitResult fit_bayesian(const ModelSpec& model, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& y, int p, const ChainConfig& cfg,
                       SampleCollection* keep_samples) {
    const int K = default_basis_size(p);
    const BasisSpec bs{p, K, model.degree, KnotPlacement::Uniform};
    const BasisMatrix B = lag_basis(bs);
    DesignMatrix X = build_design(x, bs, B);
    if (y.size() < X.entries.rows()) {
        X.entries = X.entries.bottomRows(y.size()).eval();
    }

    SampleCollection samples = run_chain(y, X, model, cfg);
    FitResult out;
    out.summary = summarize(samples, B, X, model);
    out.model = model.id;
    out.p = p;
    out.K = K;
    out.sigma2_mean = samples.sigma2.mean();
    if (keep_samples) *keep_samples = std::move(samples);
    return out;
}

FitResult fit_aic_least_squares(const ModelSpec& model, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& y, int p) {
    const int degree = model.degree;
    const int max_interior = std::max(0, (2 * p) / 3 - degree - 1);
    const int m = static_cast<int>(y.size());
    const Eigen::VectorXd lags = Eigen::VectorXd::LinSpaced(p + 1, 0.0, p);

    struct Candidate {
        int n_interior;
        double rss;
        Eigen::VectorXd coef;
        BasisMatrix basis;
        SpdFactor factor;
    };
    std::optional<Candidate> best;
    double best_aic = std::numeric_limits<double>::infinity();

    for (int z = 0; z <= max_interior; ++z) {
        const Eigen::VectorXd knots = log_knots(p, z, degree);
        BasisMatrix B = eval_basis(knots, degree, lags);
        const BasisSpec bs{p, z + degree + 1, degree, KnotPlacement::Logarithmic};
        DesignMatrix X = build_design(x, bs, B);
        if (y.size() < X.entries.rows()) {
            X.entries = X.entries.bottomRows(y.size()).eval();
        }
        try {
            SpdFactor factor = SpdFactor::compute(X.entries.transpose() * X.entries);
            Eigen::VectorXd coef = factor.solve(X.entries.transpose() * y);
            const double rss = (y - X.entries * coef).squaredNorm();
            const double score = aic(rss, m, z + degree + 1);
            if (score < best_aic) {
                best_aic = score;
                best = Candidate{z, rss, std::move(coef), std::move(B), std::move(factor)};
            }
        } catch (const NotPositiveDefinite&) {
            // Singular normal equations disqualify this knot count.
        }
    }
    if (!best) {
        throw NotPositiveDefinite(
            "fit: every candidate knot count gave singular normal equations");
    }

    const int k_params = best->n_interior + degree + 1;
    const double sigma2_hat =
        m > k_params ? best->rss / (m - k_params) : best->rss / m;

    FitResult out;
    out.model = model.id;
    out.p = p;
    out.K = k_params;
    out.sigma2_mean = sigma2_hat;

    PosteriorSummary& s = out.summary;
    s.beta_mean = best->basis.entries * best->coef;
    // Pointwise normal-theory bands from cov(coef) = sigma2_hat (X^T X)^{-1}.
    Eigen::MatrixXd cov_coef =
        sigma2_hat * best->factor.solve(Eigen::MatrixXd::Identity(k_params, k_params));
    Eigen::VectorXd se =
        (best->basis.entries * cov_coef * best->basis.entries.transpose())
            .diagonal()
            .array()
            .max(0.0)
            .sqrt();
    s.beta_lower = s.beta_mean - 1.96 * se;
    s.beta_upper = s.beta_mean + 1.96 * se;
    switch (model.m5_ed_rule) {
        case M5EdRule::BasisFunctions: s.ed = k_params; break;
        case M5EdRule::InteriorKnots: s.ed = best->n_interior; break;
        case M5EdRule::AllKnots: s.ed = best->n_interior + 2 * (degree + 1); break;
    }
    s.sample_count = 0;
    return out;
}

} // namespace

FitResult fit(const ModelSpec& model, const Eigen::VectorXd& x,
              const Eigen::VectorXd& y, int p, const ChainConfig& cfg,
              SampleCollection* keep_samples) {
    if (p < 1) throw std::invalid_argument("fit: p must be at least 1");
    if (y.size() < 1) throw std::invalid_argument("fit: y is empty");
    if (x.size() <= p) throw std::invalid_argument("fit: series length must exceed p");
    if (y.size() > x.size() - p) {
        throw std::invalid_argument("fit: y is longer than the usable window x.size() - p");
    }

    const auto start = std::chrono::steady_clock::now();
    FitResult out = fit_route(model.id) == FitRoute::Bayesian
                        ? fit_bayesian(model, x, y, p, cfg, keep_samples)
                        : fit_aic_least_squares(model, x, y, p);
    out.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

double model_ed(const FitResult& fit) { return fit.summary.ed; }

const char* model_name(ModelId id) {
    switch (id) {
        case ModelId::M1: return "M1";
        case ModelId::M2: return "M2";
        case ModelId::M3: return "M3";
        case ModelId::M4: return "M4";
        case ModelId::M5: return "M5";
    }
    throw std::logic_error("model_name: unhandled id");
}

ModelId parse_model(std::string_view name) {
    if (name.size() == 2 && (name[0] == 'M' || name[0] == 'm')) {
        switch (name[1]) {
            case '1': return ModelId::M1;
            case '2': return ModelId::M2;
            case '3': return ModelId::M3;
            case '4': return ModelId::M4;
            case '5': return ModelId::M5;
        }
    }
    throw std::invalid_argument("unknown model name: " + std::string(name));
}

} // namespace dlm
