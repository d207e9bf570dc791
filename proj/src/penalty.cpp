#include "dlm/penalty.hpp"

#include <stdexcept>

namespace {

void check_components(const dlm::PrecisionComponents& pc) {
    if (pc.lambdas.size() < 1) {
        throw std::invalid_argument("PrecisionComponents: need at least one lambda");
    }
    if ((pc.lambdas.array() <= 0.0).any()) {
        throw std::invalid_argument("PrecisionComponents: lambdas must be positive");
    }
    if (pc.rho < 0.0) {
        throw std::invalid_argument("PrecisionComponents: rho must be nonnegative");
    }
}

Eigen::MatrixXd rw1_matrix(int m) {
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(m, m);
    for (int k = 0; k + 1 < m; ++k) {
        P(k, k) += 1.0;
        P(k + 1, k + 1) += 1.0;
        P(k, k + 1) = -1.0;
        P(k + 1, k) = -1.0;
    }
    return P;
}

} // namespace

namespace dlm {

StructureMatrix build_P(int K) {
    if (K < 2) throw std::invalid_argument("build_P: K must be at least 2");
    return {rw1_matrix(K), StructureKind::P_rw1};
}

StructureMatrix build_Q(const PrecisionComponents& pc) {
    check_components(pc);
    Tridiag t = build_Q_tridiag(pc);
    const Eigen::Index K = t.diag.size();
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(K, K);
    Q.diagonal() = t.diag;
    for (Eigen::Index k = 0; k + 1 < K; ++k) {
        Q(k, k + 1) = t.offdiag(k);
        Q(k + 1, k) = t.offdiag(k);
    }
    return {std::move(Q), StructureKind::Q_adaptive};
}

Tridiag build_Q_tridiag(const PrecisionComponents& pc) {
    check_components(pc);
    const Eigen::Index K = pc.dim();
    Tridiag t;
    t.diag = Eigen::VectorXd::Zero(K);
    t.offdiag = -pc.lambdas;
    for (Eigen::Index k = 0; k + 1 < K; ++k) {
        t.diag(k) += pc.lambdas(k);
        t.diag(k + 1) += pc.lambdas(k);
    }
    t.diag(K - 1) += pc.rho;
    return t;
}

double quad_form(const PrecisionComponents& pc, const Eigen::VectorXd& b) {
    check_components(pc);
    if (b.size() != pc.dim()) {
        throw std::invalid_argument("quad_form: b has wrong length");
    }
    double q = pc.rho * b(b.size() - 1) * b(b.size() - 1);
    for (Eigen::Index k = 0; k + 1 < b.size(); ++k) {
        double d = b(k + 1) - b(k);
        q += pc.lambdas(k) * d * d;
    }
    return q;
}

StructureMatrix build_K_hyper(int m) {
    if (m < 2) throw std::invalid_argument("build_K_hyper: m must be at least 2");
    return {rw1_matrix(m), StructureKind::K_hyper};
}

StructureMatrix build_ridge_diag(int K, double scale) {
    if (K < 1) throw std::invalid_argument("build_ridge_diag: K must be at least 1");
    if (scale <= 0.0) throw std::invalid_argument("build_ridge_diag: scale must be positive");
    Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(K, 1.0, static_cast<double>(K));
    return {Eigen::MatrixXd((scale * w).asDiagonal()), StructureKind::RidgeDiag};
}

StructureMatrix build_pspline_combo(int K, double lambda, double rho) {
    if (K < 2) throw std::invalid_argument("build_pspline_combo: K must be at least 2");
    if (lambda <= 0.0) throw std::invalid_argument("build_pspline_combo: lambda must be positive");
    if (rho < 0.0) throw std::invalid_argument("build_pspline_combo: rho must be nonnegative");
    Eigen::MatrixXd S = lambda * rw1_matrix(K);
    S.diagonal().array() += rho;
    return {std::move(S), StructureKind::PSplineCombo};
}

ConditionalMoments conditional_moments_b(const PrecisionComponents& pc,
                                         const Eigen::VectorXd& b, int k) {
    check_components(pc);
    const Eigen::Index K = pc.dim();
    if (b.size() != K) {
        throw std::invalid_argument("conditional_moments_b: b has wrong length");
    }
    if (k < 1 || k > K) {
        throw std::out_of_range("conditional_moments_b: k out of range");
    }
    // Gaussian conditioning on a tridiagonal precision: b_k | rest is
    // N(-sum_{j != k} Q_kj b_j / Q_kk, 1 / Q_kk), and the only nonzero
    // off-diagonal entries in row k are -lambda_{k-1} and -lambda_k.
    Tridiag t = build_Q_tridiag(pc);
    const Eigen::Index i = k - 1;
    double cross = 0.0;
    if (i > 0) cross += pc.lambdas(i - 1) * b(i - 1);
    if (i + 1 < K) cross += pc.lambdas(i) * b(i + 1);
    return {cross / t.diag(i), 1.0 / t.diag(i)};
}

} // namespace dlm
