#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>

#include "dlm/basis.hpp"
#include "dlm/penalty.hpp"
#include "dlm/sampler.hpp"

namespace dlm {

enum class ModelId { M1, M2, M3, M4, M5 };

/// Which of M1/M2 carries the increasing ridge and which the first-difference
/// penalty.  Default gives M1 the ridge and M2 the first-difference penalty;
/// Swapped exchanges them.
enum class PenaltyAssignment { Default, Swapped };

/// What the least-squares model reports as its effective dimension.
enum class M5EdRule { BasisFunctions, InteriorKnots, AllKnots };

struct ModelSpec {
    ModelId id = ModelId::M3;
    int degree = 3;
    PenaltyAssignment assignment = PenaltyAssignment::Default;
    M5EdRule m5_ed_rule = M5EdRule::BasisFunctions;
};

enum class FitRoute { Bayesian, AicLeastSquares };
FitRoute fit_route(ModelId id);

/// Knot placement the model's basis uses (log-spaced for the AIC route).
KnotPlacement knot_placement(ModelId id);

/// Prior/penalty families of the sampled models.
enum class PriorKind { IncreasingRidge, UniformRW1, Adaptive, Combo };

/// Resolves a sampled model's prior family (honouring the M1/M2 assignment).
/// Rejects the least-squares model.
PriorKind prior_kind(const ModelSpec& spec);

/// Penalty precision matrix at explicit parameter values; its quadratic form
/// is the model's prior penalty.  params: IncreasingRidge and UniformRW1 take
/// {lambda}; Adaptive takes {lambda_1..lambda_{K-1}, rho}; Combo takes
/// {lambda, rho}.
StructureMatrix penalty_matrix(PriorKind kind, int K, const Eigen::VectorXd& params);

/// Posterior-mean parameter vector for penalty_matrix, from a chain's draws
/// (draws stored on the log scale are exponentiated before averaging; the
/// adaptive model's fixed rho is appended from the collection).
Eigen::VectorXd posterior_mean_params(PriorKind kind, const SampleCollection& samples);

struct FitResult {
    PosteriorSummary summary;
    ModelId model = ModelId::M3;
    int p = 0;               ///< maximum lag used
    int K = 0;               ///< basis size used (selected size for the AIC route)
    double sigma2_mean = 0.0;
    double elapsed_seconds = 0.0;
};

/// Fits one model.  x is the full covariate series; y holds the responses for
/// the final y.size() time points of x (so a series generated at a smaller
/// true lag can be refit at larger p by dropping leading rows).  Requires
/// 1 <= y.size() <= x.size() - p.  Sampled models use a uniform-knot basis of
/// K = floor((2/3)(p+1)); the AIC route searches log-knot bases.  Pass
/// keep_samples to also receive the raw draws.
FitResult fit(const ModelSpec& model, const Eigen::VectorXd& x,
              const Eigen::VectorXd& y, int p, const ChainConfig& cfg,
              SampleCollection* keep_samples = nullptr);

/// The fit's effective dimension (trace formula for sampled models, the
/// configured knot-count rule for the AIC route); recorded at fit time.
double model_ed(const FitResult& fit);

/// Gaussian profile-likelihood AIC, m log(rss/m) + 2 k_params; rss = 0 maps
/// to -infinity (degenerate exact fit, still comparable by minimum).
double aic(double rss, int m, int k_params);

const char* model_name(ModelId id);
ModelId parse_model(std::string_view name);

} // namespace dlm
