#include "dlm/numerics.hpp"

#include <cmath>
#include <string>

namespace dlm {

SpdFactor SpdFactor::compute(const Eigen::MatrixXd& A) {
    const Eigen::Index n = A.rows();
    if (A.cols() != n) {
        throw std::invalid_argument("SpdFactor: matrix must be square");
    }
    if (!A.isApprox(A.transpose(), 1e-10)) {
        throw NotPositiveDefinite("SpdFactor: matrix is not symmetric");
    }

    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double pivot = A(j, j) - L.row(j).head(j).squaredNorm();
        // Judge each pivot against its own column's scale: well-conditioned
        // columns of a matrix with a legitimately wide diagonal spread must
        // not be condemned by the largest one.
        const double threshold = 1e-12 * A(j, j);
        if (!std::isfinite(pivot) || pivot <= threshold) {
            throw NotPositiveDefinite(
                "SpdFactor: pivot " + std::to_string(pivot) + " at column " +
                std::to_string(j) + " (matrix not positive definite)");
        }
        L(j, j) = std::sqrt(pivot);
        for (Eigen::Index i = j + 1; i < n; ++i) {
            L(i, j) = (A(i, j) - L.row(i).head(j).dot(L.row(j).head(j))) / L(j, j);
        }
    }
    return SpdFactor(std::move(L));
}

Eigen::VectorXd SpdFactor::solve_transposed(const Eigen::VectorXd& z) const {
    return L_.transpose().triangularView<Eigen::Upper>().solve(z);
}

double SpdFactor::log_det() const {
    return 2.0 * L_.diagonal().array().log().sum();
}

Eigen::VectorXd sample_gaussian_precision(RngStream& rng,
                                          const Eigen::MatrixXd& precision,
                                          const Eigen::VectorXd& linear_term) {
    SpdFactor chol = SpdFactor::compute(precision);
    Eigen::VectorXd mean = chol.solve(linear_term);
    Eigen::VectorXd z(precision.rows());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        z(i) = rng.normal();
    }
    return mean + chol.solve_transposed(z);
}

double effective_dimension(const Eigen::MatrixXd& X, const Eigen::MatrixXd& S) {
    Eigen::MatrixXd xtx = X.transpose() * X;
    return SpdFactor::compute(xtx + S).solve(xtx).trace();
}

std::optional<double> tridiag_logdet(const Eigen::VectorXd& diag,
                                     const Eigen::VectorXd& offdiag) {
    const Eigen::Index n = diag.size();
    if (offdiag.size() != n - 1) {
        throw std::invalid_argument("tridiag_logdet: offdiag must have size n - 1");
    }
    // LDL^T pivots: d_1 = a_1, d_k = a_k - c_{k-1}^2 / d_{k-1}.
    double log_det = 0.0;
    double prev = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        double d = diag(k);
        if (k > 0) d -= offdiag(k - 1) * offdiag(k - 1) / prev;
        if (!std::isfinite(d) || d <= 0.0) return std::nullopt;
        log_det += std::log(d);
        prev = d;
    }
    return log_det;
}

} // namespace dlm
