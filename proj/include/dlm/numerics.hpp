#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>

#include "dlm/rng.hpp"

namespace dlm {

/// Thrown when a matrix required to be symmetric positive definite is not
/// (e.g. an adaptive precision matrix built with rho = 0).
struct NotPositiveDefinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
class SpdFactor {
public:
    /// Factorizes A = L L^T.  A pivot at or below 1e-12 times its own
    /// column's diagonal entry fails the factorization.
    static SpdFactor compute(const Eigen::MatrixXd& A);

    const Eigen::MatrixXd& lower() const { return L_; }
    Eigen::Index dim() const { return L_.rows(); }

    /// Solves A x = rhs for a vector or matrix right-hand side.
    template <typename Rhs>
    auto solve(const Eigen::MatrixBase<Rhs>& rhs) const {
        using Result = Eigen::Matrix<double, Eigen::Dynamic, Rhs::ColsAtCompileTime>;
        Result halfway = L_.template triangularView<Eigen::Lower>().solve(rhs.derived());
        Result out = L_.transpose().template triangularView<Eigen::Upper>().solve(halfway);
        return out;
    }

    /// Solves L^T u = z (used to turn standard normals into N(0, A^{-1})).
    Eigen::VectorXd solve_transposed(const Eigen::VectorXd& z) const;

    /// log det A = 2 sum log diag(L).
    double log_det() const;

private:
    explicit SpdFactor(Eigen::MatrixXd L) : L_(std::move(L)) {}
    Eigen::MatrixXd L_;
};

/// One exact draw from N(precision^{-1} linear_term, precision^{-1}).
Eigen::VectorXd sample_gaussian_precision(RngStream& rng,
                                          const Eigen::MatrixXd& precision,
                                          const Eigen::VectorXd& linear_term);

/// Effective degrees of freedom tr[(X^T X + S)^{-1} X^T X] of the penalized
/// fit with penalty matrix S; equals the trace of the smoother's hat matrix.
double effective_dimension(const Eigen::MatrixXd& X, const Eigen::MatrixXd& S);

/// log det of a symmetric tridiagonal matrix via its LDL^T pivots.
/// Returns nullopt when a pivot is non-positive or non-finite.
std::optional<double> tridiag_logdet(const Eigen::VectorXd& diag,
                                     const Eigen::VectorXd& offdiag);

} // namespace dlm
