#pragma once

#include <Eigen/Dense>

namespace dlm {

/// Parameters of the adaptive tridiagonal precision matrix: one smoothing
/// precision per adjacent coefficient pair, plus a corner mass on the last
/// coefficient that makes the matrix nonsingular when positive.
struct PrecisionComponents {
    Eigen::VectorXd lambdas; ///< K-1 pairwise precisions, all > 0
    double rho = 0.0;        ///< corner regularisation, >= 0

    /// Dimension K of the precision matrix these components describe.
    Eigen::Index dim() const { return lambdas.size() + 1; }
};

enum class StructureKind { P_rw1, Q_adaptive, K_hyper, RidgeDiag, PSplineCombo };

/// A symmetric penalty/precision matrix tagged with its construction.
struct StructureMatrix {
    Eigen::MatrixXd entries;
    StructureKind kind;
};

/// First-difference structure matrix: b^T P b = sum (b_{k+1} - b_k)^2.
StructureMatrix build_P(int K);

/// Adaptive precision: tridiagonal with Q_11 = lambda_1,
/// Q_kk = lambda_{k-1} + lambda_k, Q_KK = lambda_{K-1} + rho,
/// off-diagonal -lambda_k.
StructureMatrix build_Q(const PrecisionComponents& pc);

/// Diagonal and first off-diagonal of build_Q, for O(K) determinant work.
struct Tridiag {
    Eigen::VectorXd diag;
    Eigen::VectorXd offdiag;
};
Tridiag build_Q_tridiag(const PrecisionComponents& pc);

/// b^T Q b evaluated in O(K) as sum lambda_k (b_{k+1}-b_k)^2 + rho b_K^2.
double quad_form(const PrecisionComponents& pc, const Eigen::VectorXd& b);

/// Structure matrix of the log-precision hyper-prior: m x m, same
/// first-difference pattern as build_P, rank m-1.
StructureMatrix build_K_hyper(int m);

/// Lag-increasing ridge: scale * diag(1, 2, ..., K).
StructureMatrix build_ridge_diag(int K, double scale);

/// Uniform first-difference penalty with ridge floor: lambda * P + rho * I.
StructureMatrix build_pspline_combo(int K, double lambda, double rho);

/// Conditional prior mean/variance of b_k given the other coordinates under
/// N(0, Q^{-1}) with Q = build_Q(pc).  k is one-based, 1 <= k <= K.
struct ConditionalMoments {
    double mean;
    double variance;
};
ConditionalMoments conditional_moments_b(const PrecisionComponents& pc,
                                         const Eigen::VectorXd& b, int k);

} // namespace dlm
