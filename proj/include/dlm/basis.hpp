#pragma once

#include <Eigen/Dense>

namespace dlm {

enum class KnotPlacement { Uniform, Logarithmic };

/// Describes a B-spline basis over the lag indices 0..p.
struct BasisSpec {
    int p;                                            ///< maximum lag, >= 1
    int K;                                            ///< basis size, >= degree + 1
    int degree = 3;                                   ///< spline degree
    KnotPlacement placement = KnotPlacement::Uniform;
};

/// Default basis size floor((2/3)(p+1)) used when none is given.
int default_basis_size(int p);

/// B-spline values over the lags: entry (j, k) = B_k(j), shape (p+1) x K.
struct BasisMatrix {
    Eigen::MatrixXd entries;
};

/// Lagged-covariate design: entry (i, k) = sum_j x_{i-j} B_k(j), one row per
/// usable time point i = p+1..n, shape (n-p) x K.
struct DesignMatrix {
    Eigen::MatrixXd entries;
};

/// Clamped knot vector on [0, p] with K - degree - 1 equally spaced interior
/// knots and boundary knots repeated degree+1 times.
Eigen::VectorXd uniform_knots(const BasisSpec& spec);

/// Clamped knot vector on [0, p] whose interior knots are equally spaced on
/// the log(1 + lag) scale, so knot density decreases with lag.
Eigen::VectorXd log_knots(int p, int n_interior, int degree);

/// Evaluates all knots.size() - degree - 1 basis functions at each point
/// (Cox-de Boor recursion).  Points must lie within the knot range.
BasisMatrix eval_basis(const Eigen::VectorXd& knots, int degree,
                       const Eigen::VectorXd& points);

/// Basis evaluated at the integer lags 0..p with knots per spec.placement.
BasisMatrix lag_basis(const BasisSpec& spec);

/// Collapses the lagged covariate into the DLM design, row i equal to
/// (x_i, x_{i-1}, ..., x_{i-p}) * basis.
DesignMatrix build_design(const Eigen::VectorXd& x, const BasisSpec& spec,
                          const BasisMatrix& basis);

} // namespace dlm
