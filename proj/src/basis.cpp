#include "dlm/basis.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace {

void check_spec(const dlm::BasisSpec& spec) {
    if (spec.p < 1) throw std::invalid_argument("BasisSpec: p must be at least 1");
    if (spec.degree < 0) throw std::invalid_argument("BasisSpec: degree must be nonnegative");
    if (spec.K < spec.degree + 1) {
        throw std::invalid_argument("BasisSpec: K must be at least degree + 1");
    }
}

Eigen::VectorXd clamped_knots(double hi, const std::vector<double>& interior, int degree) {
    Eigen::VectorXd knots(interior.size() + 2 * (degree + 1));
    Eigen::Index at = 0;
    for (int r = 0; r <= degree; ++r) knots(at++) = 0.0;
    for (double q : interior) knots(at++) = q;
    for (int r = 0; r <= degree; ++r) knots(at++) = hi;
    return knots;
}

/// Index s of the knot span containing u: knots[s] <= u < knots[s+1], with
/// u at the right end of the range mapped into the last nonempty span.
Eigen::Index find_span(const Eigen::VectorXd& knots, int degree, double u) {
    const Eigen::Index n = knots.size() - degree - 2; // last basis index
    if (u >= knots(n + 1)) return n;
    Eigen::Index lo = degree, hi = n + 1;
    while (hi - lo > 1) {
        Eigen::Index mid = (lo + hi) / 2;
        if (u < knots(mid)) hi = mid; else lo = mid;
    }
    return lo;
}

/// Values of the degree+1 basis functions alive on the span (triangular
/// Cox--de Boor scheme; no zero divisions occur for a valid span).
void basis_funs(const Eigen::VectorXd& knots, int degree, Eigen::Index span,
                double u, std::vector<double>& N) {
    std::vector<double> left(degree + 1), right(degree + 1);
    N.assign(degree + 1, 0.0);
    N[0] = 1.0;
    for (int j = 1; j <= degree; ++j) {
        left[j] = u - knots(span + 1 - j);
        right[j] = knots(span + j) - u;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            double temp = N[r] / (right[r + 1] + left[j - r]);
            N[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        N[j] = saved;
    }
}

} // namespace

namespace dlm {

int default_basis_size(int p) {
    if (p < 1) throw std::invalid_argument("default_basis_size: p must be at least 1");
    return (2 * (p + 1)) / 3;
}

Eigen::VectorXd uniform_knots(const BasisSpec& spec) {
    check_spec(spec);
    if (spec.placement != KnotPlacement::Uniform) {
        throw std::invalid_argument("uniform_knots: spec.placement must be Uniform");
    }
    const int n_interior = spec.K - spec.degree - 1;
    std::vector<double> interior(n_interior);
    for (int i = 1; i <= n_interior; ++i) {
        interior[i - 1] = spec.p * static_cast<double>(i) / (n_interior + 1);
    }
    return clamped_knots(spec.p, interior, spec.degree);
}

Eigen::VectorXd log_knots(int p, int n_interior, int degree) {
    if (p < 1) throw std::invalid_argument("log_knots: p must be at least 1");
    if (n_interior < 0) throw std::invalid_argument("log_knots: n_interior must be nonnegative");
    if (degree < 0) throw std::invalid_argument("log_knots: degree must be nonnegative");
    const double log_span = std::log1p(static_cast<double>(p));
    std::vector<double> interior(n_interior);
    for (int i = 1; i <= n_interior; ++i) {
        double q = static_cast<double>(i) / (n_interior + 1);
        interior[i - 1] = std::expm1(q * log_span);
    }
    return clamped_knots(p, interior, degree);
}

BasisMatrix eval_basis(const Eigen::VectorXd& knots, int degree,
                       const Eigen::VectorXd& points) {
    if (degree < 0) throw std::invalid_argument("eval_basis: degree must be nonnegative");
    const Eigen::Index K = knots.size() - degree - 1;
    if (K < 1) throw std::invalid_argument("eval_basis: too few knots for the degree");
    for (Eigen::Index i = 0; i + 1 < knots.size(); ++i) {
        if (knots(i) > knots(i + 1)) {
            throw std::invalid_argument("eval_basis: knots must be nondecreasing");
        }
    }

    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(points.size(), K);
    std::vector<double> N;
    for (Eigen::Index r = 0; r < points.size(); ++r) {
        const double u = points(r);
        if (u < knots(0) || u > knots(knots.size() - 1)) {
            throw std::invalid_argument("eval_basis: point outside the knot range");
        }
        const Eigen::Index span = find_span(knots, degree, u);
        basis_funs(knots, degree, span, u, N);
        for (int j = 0; j <= degree; ++j) {
            B(r, span - degree + j) = N[j];
        }
    }
    return {std::move(B)};
}

BasisMatrix lag_basis(const BasisSpec& spec) {
    check_spec(spec);
    Eigen::VectorXd knots = spec.placement == KnotPlacement::Uniform
                                ? uniform_knots(spec)
                                : log_knots(spec.p, spec.K - spec.degree - 1, spec.degree);
    Eigen::VectorXd lags = Eigen::VectorXd::LinSpaced(spec.p + 1, 0.0, spec.p);
    return eval_basis(knots, spec.degree, lags);
}

DesignMatrix build_design(const Eigen::VectorXd& x, const BasisSpec& spec,
                          const BasisMatrix& basis) {
    check_spec(spec);
    const Eigen::Index n = x.size();
    const Eigen::Index p = spec.p;
    if (n <= p) throw std::invalid_argument("build_design: series length must exceed p");
    if (basis.entries.rows() != p + 1) {
        throw std::invalid_argument("build_design: basis must have p + 1 rows");
    }
    // Lag embedding L(x), row r for time i = p + r: (x_i, x_{i-1}, ..., x_{i-p}).
    Eigen::MatrixXd L(n - p, p + 1);
    for (Eigen::Index r = 0; r < n - p; ++r) {
        for (Eigen::Index j = 0; j <= p; ++j) {
            L(r, j) = x(p + r - j);
        }
    }
    return {L * basis.entries};
}

} // namespace dlm
