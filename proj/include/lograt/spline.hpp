#pragma once

// Cubic B-spline basis with a knot at every unique sample position.
//
// The basis lives on the clamped knot vector t0,t0,t0,t0,t1,...,t(k-2),t(k-1)x4
// and has dimension K = k + 2 for k breakpoints. Outside [t0, t(k-1)] every
// basis function is continued linearly, so second derivatives vanish there.
// Combined with the curvature penalty this reproduces natural cubic smoothing
// splines.

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace lograt {

class BSplineBasis {
public:
    static constexpr int degree = 3;

    /// `breakpoints` must hold >= 2 strictly increasing values.
    explicit BSplineBasis(std::vector<double> breakpoints);

    std::size_t dimension() const noexcept { return breaks_.size() + 2; }
    const std::vector<double>& breakpoints() const noexcept { return breaks_; }
    double lower() const noexcept { return breaks_.front(); }
    double upper() const noexcept { return breaks_.back(); }

    /// Values (deriv 0), first or second derivatives of all K basis functions at x.
    Eigen::VectorXd evaluate(double x, int deriv = 0) const;

    /// Sum_j coef_j h_j^(deriv)(x), touching only the 4 supported functions.
    double evaluate(const Eigen::VectorXd& coef, double x, int deriv = 0) const;

    /// n x K matrix of basis values (or derivatives) at the given points.
    Eigen::MatrixXd design_matrix(std::span<const double> x, int deriv = 0) const;

    /// Knot averages; the coefficients of the identity function x -> x.
    Eigen::VectorXd greville() const;

    /// Exact Gram matrix of second derivatives over [lower, upper].
    Eigen::MatrixXd penalty() const;
    /// k x K factor E with E'E = penalty(), built from second derivatives at the knots.
    Eigen::MatrixXd penalty_root() const;

private:
    struct Local {
        std::size_t first = 0;  // index of the first nonzero basis function
        std::array<std::array<double, 4>, 3> ders{};  // ders[order][i]
    };

    Local local(double x) const;  // x clamped to [lower, upper]
    std::size_t span_of(double x) const;

    std::vector<double> breaks_;
    std::vector<double> knots_;  // clamped extended knot vector, size K + 4
};

BSplineBasis build_basis(std::vector<double> knots);
Eigen::VectorXd eval_basis(const BSplineBasis& basis, double x, int deriv_order);
Eigen::MatrixXd penalty_matrix(const BSplineBasis& basis);

}  // namespace lograt
