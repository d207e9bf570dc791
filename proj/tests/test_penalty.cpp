#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "dlm/penalty.hpp"
#include "dlm/rng.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using dlm::PrecisionComponents;
using dlm::StructureKind;
using dlm::StructureMatrix;

namespace {

PrecisionComponents random_components(dlm::RngStream& rng, int K, bool with_rho) {
    PrecisionComponents pc;
    pc.lambdas = Eigen::VectorXd(K - 1);
    for (int k = 0; k + 1 < K; ++k) pc.lambdas(k) = std::exp(3.0 * (rng.uniform() - 0.5));
    pc.rho = with_rho ? 0.2 + rng.uniform() : 0.0;
    return pc;
}

} // namespace

TEST_SUITE("penalty") {

TEST_CASE("first-difference structure matrix, exact small case") {
    const StructureMatrix P = dlm::build_P(3);
    CHECK(P.kind == StructureKind::P_rw1);
    Eigen::MatrixXd expected(3, 3);
    expected << 1, -1, 0,
               -1,  2, -1,
                0, -1,  1;
    CHECK((P.entries - expected).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(dlm::build_P(1), std::invalid_argument);
}

TEST_CASE("adaptive precision, exact small case") {
    PrecisionComponents pc;
    pc.lambdas = Eigen::Vector2d(2.0, 5.0);
    pc.rho = 0.7;
    const StructureMatrix Q = dlm::build_Q(pc);
    CHECK(Q.kind == StructureKind::Q_adaptive);
    Eigen::MatrixXd expected(3, 3);
    expected << 2, -2, 0,
               -2,  7, -5,
                0, -5,  5.7;
    CHECK((Q.entries - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("equal smoothing with no corner mass collapses to the shared structure") {
    dlm::RngStream rng(101);
    for (int K = 2; K <= 50; ++K) {
        const double lambda = std::exp(4.0 * (rng.uniform() - 0.5));
        PrecisionComponents pc;
        pc.lambdas = Eigen::VectorXd::Constant(K - 1, lambda);
        pc.rho = 0.0;
        const Eigen::MatrixXd Q = dlm::build_Q(pc).entries;
        const Eigen::MatrixXd scaled = lambda * dlm::build_P(K).entries;
        CHECK((Q - scaled).cwiseAbs().maxCoeff() == 0.0); // bitwise identical
    }
}

TEST_CASE("quadratic form matches the dense matrix product") {
    dlm::RngStream rng(102);
    double max_dev = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int K = 2 + static_cast<int>(rng.uniform() * 11);
        const PrecisionComponents pc = random_components(rng, K, trial % 2 == 0);
        Eigen::VectorXd b(K);
        for (int k = 0; k < K; ++k) b(k) = rng.normal();
        const double fast = dlm::quad_form(pc, b);
        const double dense = b.transpose() * dlm::build_Q(pc).entries * b;
        max_dev = std::max(max_dev, std::abs(fast - dense));
        CHECK(fast >= 0.0);
    }
    CHECK(max_dev <= 1e-12);

    PrecisionComponents pc;
    pc.lambdas = Eigen::Vector2d(1.0, 1.0);
    CHECK_THROWS_AS(dlm::quad_form(pc, Eigen::VectorXd::Zero(2)), std::invalid_argument);
}

TEST_CASE("tridiagonal bands agree with the dense construction") {
    dlm::RngStream rng(103);
    for (int trial = 0; trial < 50; ++trial) {
        const int K = 2 + static_cast<int>(rng.uniform() * 20);
        const PrecisionComponents pc = random_components(rng, K, true);
        const dlm::Tridiag t = dlm::build_Q_tridiag(pc);
        const Eigen::MatrixXd Q = dlm::build_Q(pc).entries;
        REQUIRE(t.diag.size() == K);
        REQUIRE(t.offdiag.size() == K - 1);
        for (int k = 0; k < K; ++k) CHECK(t.diag(k) == Q(k, k));
        for (int k = 0; k + 1 < K; ++k) CHECK(t.offdiag(k) == Q(k, k + 1));
    }
}

TEST_CASE("hyper-prior structure matrix") {
    const StructureMatrix Kh = dlm::build_K_hyper(5);
    CHECK(Kh.kind == StructureKind::K_hyper);
    Eigen::VectorXd diag_expected(5);
    diag_expected << 1, 2, 2, 2, 1;
    CHECK((Kh.entries.diagonal() - diag_expected).cwiseAbs().maxCoeff() == 0.0);
    // Annihilates constants exactly, so it penalises only differences.
    CHECK((Kh.entries * Eigen::VectorXd::Ones(5)).cwiseAbs().maxCoeff() == 0.0);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Kh.entries);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12); // positive semidefinite
    int n_null = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        if (es.eigenvalues()(i) < 1e-10) ++n_null;
    }
    CHECK(n_null == 1); // rank m - 1

    CHECK_THROWS_AS(dlm::build_K_hyper(1), std::invalid_argument);
}

TEST_CASE("lag-increasing ridge diagonal") {
    const StructureMatrix R = dlm::build_ridge_diag(34, 2.0);
    CHECK(R.kind == StructureKind::RidgeDiag);
    REQUIRE(R.entries.rows() == 34);
    CHECK(R.entries(0, 0) == 2.0);
    CHECK(R.entries(33, 33) == 68.0);
    for (int k = 0; k < 34; ++k) CHECK(R.entries(k, k) == 2.0 * (k + 1));
    CHECK(R.entries.cwiseAbs().sum() == R.entries.diagonal().cwiseAbs().sum());
    CHECK_THROWS_AS(dlm::build_ridge_diag(3, 0.0), std::invalid_argument);
}

TEST_CASE("difference penalty with ridge floor") {
    const StructureMatrix S = dlm::build_pspline_combo(2, 1.0, 1.0);
    CHECK(S.kind == StructureKind::PSplineCombo);
    Eigen::MatrixXd expected(2, 2);
    expected << 2, -1,
               -1,  2;
    CHECK((S.entries - expected).cwiseAbs().maxCoeff() == 0.0);

    // General case: lambda P + rho I.
    const Eigen::MatrixXd big = dlm::build_pspline_combo(7, 3.5, 0.25).entries;
    const Eigen::MatrixXd ref = 3.5 * dlm::build_P(7).entries
                              + 0.25 * Eigen::MatrixXd::Identity(7, 7);
    CHECK((big - ref).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK_THROWS_AS(dlm::build_pspline_combo(1, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(dlm::build_pspline_combo(4, -1.0, 0.0), std::invalid_argument);
}

TEST_CASE("conditional moments, closed forms") {
    PrecisionComponents pc;
    pc.lambdas = Eigen::Vector2d(2.0, 5.0);
    pc.rho = 0.7;
    Eigen::Vector3d b(0.4, -1.1, 2.2);

    const auto first = dlm::conditional_moments_b(pc, b, 1);
    CHECK(first.mean == doctest::Approx(-1.1).epsilon(1e-15));
    CHECK(first.variance == doctest::Approx(0.5).epsilon(1e-15));

    const auto mid = dlm::conditional_moments_b(pc, b, 2);
    CHECK(mid.mean == doctest::Approx((2.0 * 0.4 + 5.0 * 2.2) / 7.0).epsilon(1e-15));
    CHECK(mid.variance == doctest::Approx(1.0 / 7.0).epsilon(1e-15));

    const auto last = dlm::conditional_moments_b(pc, b, 3);
    CHECK(last.mean == doctest::Approx(5.0 * -1.1 / 5.7).epsilon(1e-15));
    CHECK(last.variance == doctest::Approx(1.0 / 5.7).epsilon(1e-15));

    CHECK_THROWS_AS(dlm::conditional_moments_b(pc, b, 0), std::out_of_range);
    CHECK_THROWS_AS(dlm::conditional_moments_b(pc, b, 4), std::out_of_range);
    CHECK_THROWS_AS(dlm::conditional_moments_b(pc, Eigen::VectorXd::Zero(4), 1),
                    std::invalid_argument);
}

TEST_CASE("conditional moments match dense Gaussian conditioning") {
    dlm::RngStream rng(104);
    double max_dev = 0.0;
    for (int trial = 0; trial < 60; ++trial) {
        const int K = 2 + static_cast<int>(rng.uniform() * 9); // K <= 10
        const PrecisionComponents pc = random_components(rng, K, true);
        Eigen::VectorXd b(K);
        for (int k = 0; k < K; ++k) b(k) = 2.0 * rng.normal();
        const Eigen::MatrixXd Q = dlm::build_Q(pc).entries;
        for (int k = 1; k <= K; ++k) {
            const auto fast = dlm::conditional_moments_b(pc, b, k);
            const auto ref = oracle::dense_conditional(Q, b, k);
            max_dev = std::max(max_dev, std::abs(fast.mean - ref.mean));
            max_dev = std::max(max_dev, std::abs(fast.variance - ref.variance));
        }
    }
    CHECK(max_dev <= 1e-8);
}

TEST_CASE("conditional mean is linear in the conditioning values") {
    PrecisionComponents pc;
    pc.lambdas = Eigen::Vector3d(1.5, 0.8, 2.2);
    pc.rho = 0.4;
    Eigen::VectorXd b(4);
    b << 0.3, -0.6, 1.4, 0.9;
    for (int k = 1; k <= 4; ++k) {
        const auto one = dlm::conditional_moments_b(pc, b, k);
        const auto three = dlm::conditional_moments_b(pc, Eigen::VectorXd(3.0 * b), k);
        CHECK(three.mean == doctest::Approx(3.0 * one.mean).epsilon(1e-13));
        CHECK(three.variance == doctest::Approx(one.variance).epsilon(1e-15));
    }
}

TEST_CASE("component validation") {
    PrecisionComponents empty;
    empty.lambdas = Eigen::VectorXd();
    CHECK_THROWS_AS(dlm::build_Q(empty), std::invalid_argument);

    PrecisionComponents bad_lambda;
    bad_lambda.lambdas = Eigen::Vector2d(1.0, -0.5);
    CHECK_THROWS_AS(dlm::build_Q(bad_lambda), std::invalid_argument);

    PrecisionComponents bad_rho;
    bad_rho.lambdas = Eigen::Vector2d(1.0, 1.0);
    bad_rho.rho = -0.1;
    CHECK_THROWS_AS(dlm::build_Q(bad_rho), std::invalid_argument);
}

} // TEST_SUITE("penalty")
