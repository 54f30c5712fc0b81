#include "lograt/spline.hpp"

#include "lograt/error.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>

namespace lograt {

BSplineBasis::BSplineBasis(std::vector<double> breakpoints) : breaks_(std::move(breakpoints)) {
    if (breaks_.size() < 2) throw Error("spline basis needs at least 2 knots");
    for (std::size_t i = 0; i < breaks_.size(); ++i) {
        if (!std::isfinite(breaks_[i])) throw Error("spline knots must be finite");
        if (i > 0 && !(breaks_[i] > breaks_[i - 1])) throw Error("spline knots must be strictly increasing");
    }
    knots_.reserve(breaks_.size() + 6);
    knots_.insert(knots_.end(), degree, breaks_.front());
    knots_.insert(knots_.end(), breaks_.begin(), breaks_.end());
    knots_.insert(knots_.end(), degree, breaks_.back());
}

std::size_t BSplineBasis::span_of(double x) const {
    // Largest s in [degree, K-1] with knots_[s] <= x; the last interval is closed.
    const std::size_t k = dimension();
    if (x >= knots_[k]) return k - 1;
    auto it = std::upper_bound(knots_.begin() + degree, knots_.begin() + static_cast<std::ptrdiff_t>(k), x);
    return static_cast<std::size_t>(it - knots_.begin()) - 1;
}

BSplineBasis::Local BSplineBasis::local(double x) const {
    constexpr int p = degree;
    x = std::clamp(x, lower(), upper());
    const std::size_t s = span_of(x);

    // Cox-de Boor triangle with derivatives (Piegl & Tiller, A2.3).
    std::array<std::array<double, p + 1>, p + 1> ndu{};
    std::array<double, p + 1> left{}, right{};
    ndu[0][0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = x - knots_[s + 1 - j];
        right[j] = knots_[s + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu[j][r] = right[r + 1] + left[j - r];
            const double temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }

    Local out;
    out.first = s - p;
    for (int j = 0; j <= p; ++j) out.ders[0][j] = ndu[j][p];

    std::array<std::array<double, p + 1>, 2> a{};
    for (int r = 0; r <= p; ++r) {
        int s1 = 0, s2 = 1;
        a[0][0] = 1.0;
        for (int k = 1; k <= 2; ++k) {
            double d = 0.0;
            const int rk = r - k, pk = p - k;
            if (r >= k) {
                a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
                d = a[s2][0] * ndu[rk][pk];
            }
            const int j1 = rk >= -1 ? 1 : -rk;
            const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
                d += a[s2][j] * ndu[rk + j][pk];
            }
            if (r <= pk) {
                a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                d += a[s2][k] * ndu[r][pk];
            }
            out.ders[k][r] = d;
            std::swap(s1, s2);
        }
    }
    for (int r = 0; r <= p; ++r) {
        out.ders[1][r] *= p;
        out.ders[2][r] *= p * (p - 1);
    }
    return out;
}

Eigen::VectorXd BSplineBasis::evaluate(double x, int deriv) const {
    if (deriv < 0 || deriv > 2) throw Error("derivative order must be 0, 1 or 2");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dimension()));
    const Local loc = local(x);
    const double edge = x < lower() ? lower() : (x > upper() ? upper() : x);
    const double dx = x - edge;  // nonzero only when extrapolating
    for (int i = 0; i <= degree; ++i) {
        const auto j = static_cast<Eigen::Index>(loc.first) + i;
        switch (deriv) {
        case 0: out[j] = loc.ders[0][i] + dx * loc.ders[1][i]; break;
        case 1: out[j] = loc.ders[1][i]; break;
        default: out[j] = dx == 0.0 ? loc.ders[2][i] : 0.0; break;
        }
    }
    return out;
}

double BSplineBasis::evaluate(const Eigen::VectorXd& coef, double x, int deriv) const {
    if (deriv < 0 || deriv > 2) throw Error("derivative order must be 0, 1 or 2");
    const Local loc = local(x);
    const double edge = std::clamp(x, lower(), upper());
    const double dx = x - edge;
    double v0 = 0.0, v1 = 0.0, v2 = 0.0;
    for (int i = 0; i <= degree; ++i) {
        const double c = coef[static_cast<Eigen::Index>(loc.first) + i];
        v0 += c * loc.ders[0][i];
        v1 += c * loc.ders[1][i];
        v2 += c * loc.ders[2][i];
    }
    switch (deriv) {
    case 0: return v0 + dx * v1;
    case 1: return v1;
    default: return dx == 0.0 ? v2 : 0.0;
    }
}

Eigen::MatrixXd BSplineBasis::design_matrix(std::span<const double> x, int deriv) const {
    Eigen::MatrixXd b(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(dimension()));
    for (std::size_t i = 0; i < x.size(); ++i) b.row(static_cast<Eigen::Index>(i)) = evaluate(x[i], deriv).transpose();
    return b;
}

Eigen::VectorXd BSplineBasis::greville() const {
    const auto k = static_cast<Eigen::Index>(dimension());
    Eigen::VectorXd g(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        const auto u = static_cast<std::size_t>(j);
        g[j] = (knots_[u + 1] + knots_[u + 2] + knots_[u + 3]) / 3.0;
    }
    return g;
}

Eigen::MatrixXd BSplineBasis::penalty() const {
    // Second derivatives are linear on each knot interval, so the 3-point
    // Gauss-Legendre rule integrates their products exactly.
    static constexpr std::array<double, 3> nodes{-0.7745966692414834, 0.0, 0.7745966692414834};
    static constexpr std::array<double, 3> weights{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

    const auto k = static_cast<Eigen::Index>(dimension());
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(k, k);
    for (std::size_t iv = 0; iv + 1 < breaks_.size(); ++iv) {
        const double a = breaks_[iv], b = breaks_[iv + 1];
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        for (int q = 0; q < 3; ++q) {
            const Local loc = local(mid + half * nodes[q]);
            const double w = weights[q] * half;
            for (int i = 0; i <= degree; ++i)
                for (int j = 0; j <= degree; ++j)
                    omega(static_cast<Eigen::Index>(loc.first) + i, static_cast<Eigen::Index>(loc.first) + j) +=
                        w * loc.ders[2][i] * loc.ders[2][j];
        }
    }
    return 0.5 * (omega + omega.transpose());
}

BSplineBasis build_basis(std::vector<double> knots) { return BSplineBasis(std::move(knots)); }

Eigen::VectorXd eval_basis(const BSplineBasis& basis, double x, int deriv_order) {
    return basis.evaluate(x, deriv_order);
}

Eigen::MatrixXd BSplineBasis::penalty_root() const {
    // h'' is piecewise linear with values D b at the breakpoints, so the
    // penalty is (D b)' G (D b) with G the Gram matrix of the hat functions.
    const auto k = static_cast<Eigen::Index>(breaks_.size());
    const auto dim = static_cast<Eigen::Index>(dimension());
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(k, dim);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index j = 0; j < k; ++j) {
        const Local loc = local(breaks_[static_cast<std::size_t>(j)]);
        for (int i = 0; i <= degree; ++i) d(j, static_cast<Eigen::Index>(loc.first) + i) = loc.ders[2][i];
        if (j + 1 < k) {
            const double h = breaks_[static_cast<std::size_t>(j + 1)] - breaks_[static_cast<std::size_t>(j)];
            g(j, j) += h / 3.0;
            g(j + 1, j + 1) += h / 3.0;
            g(j, j + 1) = g(j + 1, j) = h / 6.0;
        }
    }
    const Eigen::MatrixXd l = g.llt().matrixL();
    return l.transpose() * d;
}

Eigen::MatrixXd penalty_matrix(const BSplineBasis& basis) { return basis.penalty(); }

}  // namespace lograt
