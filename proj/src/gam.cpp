#include "lograt/gam.hpp"

#include "lograt/error.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace lograt {

namespace {

constexpr double kMaxEta = 700.0;

double safe_exp(double eta) { return std::exp(std::clamp(eta, -kMaxEta, kMaxEta)); }

double weight_at(std::span<const double> w, std::size_t i) { return w.empty() ? 1.0 : w[i]; }

std::vector<double> unique_sorted(std::span<const double> x) {
    std::vector<double> u(x.begin(), x.end());
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    return u;
}

void check_inputs(std::span<const double> x, std::span<const double> y, std::span<const double> w,
                  const Family& family) {
    if (x.size() != y.size()) throw Error("x and y differ in length");
    if (!w.empty() && w.size() != y.size()) throw Error("weights and y differ in length");
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw Error("non-finite observation");
        if (!w.empty() && !(w[i] >= 0.0)) throw Error("weights must be nonnegative");
    }
    if (family.kind == Family::Kind::Tweedie) {
        if (std::any_of(y.begin(), y.end(), [](double v) { return v < 0.0; }))
            throw Error("Tweedie response must be nonnegative");
        if (std::none_of(y.begin(), y.end(), [](double v) { return v > 0.0; }))
            throw Error("Tweedie response needs at least one positive value");
    }
}

// Deviance of the best constant (weighted mean) fit; sets the scale for
// convergence floors and GCV tie detection.
double null_deviance(std::span<const double> y, std::span<const double> w, const Family& family) {
    double sw = 0.0, swy = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        sw += weight_at(w, i);
        swy += weight_at(w, i) * y[i];
    }
    const double mean = sw > 0.0 ? swy / sw : 0.0;
    std::vector<double> mu(y.size(), family.kind == Family::Kind::Tweedie ? std::max(mean, 1e-300) : mean);
    return family.deviance(y, mu, w);
}

struct Solved {
    Eigen::VectorXd beta;
    double edf = 0.0;
};

// Least squares on [sqrt(W) B; sqrt(lambda) E] beta ~ [sqrt(W) z; 0]. Working
// with the QR factor avoids squaring the condition number of B^T W B + lambda S.
// edf = tr(hat) = squared Frobenius norm of the data rows of the thin Q.
Solved penalized_solve(const Eigen::MatrixXd& b, const Eigen::VectorXd& w, const Eigen::VectorXd& z,
                       const Eigen::MatrixXd& root, double lambda) {
    const Eigen::Index n = b.rows(), k = b.cols(), m = root.rows();
    const Eigen::VectorXd sw = w.cwiseSqrt();
    Eigen::MatrixXd x(n + m, k);
    x.topRows(n) = sw.asDiagonal() * b;
    x.bottomRows(m) = std::sqrt(lambda) * root;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + m);
    rhs.head(n) = sw.cwiseProduct(z);

    Solved out;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(x);
    out.beta = cod.solve(rhs);
    const Eigen::Index r = cod.rank();
    const Eigen::MatrixXd q = cod.householderQ() * Eigen::MatrixXd::Identity(n + m, r);
    out.edf = q.topRows(n).squaredNorm();
    return out;
}

}  // namespace

Family Family::tweedie(double p) {
    if (!(p > 1.0 && p < 2.0)) throw Error("Tweedie power must lie in (1,2)");
    return Family{Kind::Tweedie, p};
}

double Family::variance(double mu) const { return kind == Kind::Tweedie ? std::pow(mu, power) : 1.0; }

double Family::link(double mu) const { return kind == Kind::Tweedie ? std::log(mu) : mu; }

double Family::inverse_link(double eta) const { return kind == Kind::Tweedie ? safe_exp(eta) : eta; }

double Family::deviance(std::span<const double> y, std::span<const double> mu,
                        std::span<const double> weights) const {
    if (kind == Kind::Tweedie) return tweedie_deviance(y, mu, power, weights);
    if (y.size() != mu.size()) throw Error("y and mu differ in length");
    double d = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) d += weight_at(weights, i) * (y[i] - mu[i]) * (y[i] - mu[i]);
    return d;
}

double tweedie_deviance(std::span<const double> y, std::span<const double> mu, double p,
                        std::span<const double> weights) {
    if (!(p > 1.0 && p < 2.0)) throw Error("Tweedie power must lie in (1,2)");
    if (y.size() != mu.size()) throw Error("y and mu differ in length");
    if (!weights.empty() && weights.size() != y.size()) throw Error("weights and y differ in length");
    double d = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!(mu[i] > 0.0)) throw Error("Tweedie mean must be positive");
        if (y[i] < 0.0) throw Error("Tweedie response must be nonnegative");
        const double first = y[i] > 0.0 ? y[i] * (std::pow(y[i], 1.0 - p) - std::pow(mu[i], 1.0 - p)) / (1.0 - p) : 0.0;
        const double second = (std::pow(y[i], 2.0 - p) - std::pow(mu[i], 2.0 - p)) / (2.0 - p);
        d += weight_at(weights, i) * (first - second);
    }
    return std::max(2.0 * d, 0.0);
}

SmoothFit fit_pirls(std::span<const double> x, std::span<const double> y, std::span<const double> weights,
                    const Family& family, double lambda, const PirlsOptions& options) {
    const auto knots = unique_sorted(x);
    if (knots.size() < 2) throw Error("penalized fit needs at least 2 distinct positions");
    auto basis = std::make_shared<const BSplineBasis>(knots);
    return fit_pirls(basis, basis->penalty_root(), x, y, weights, family, lambda, options);
}

SmoothFit fit_pirls(std::shared_ptr<const BSplineBasis> basis, const Eigen::MatrixXd& root,
                    std::span<const double> x, std::span<const double> y, std::span<const double> weights,
                    const Family& family, double lambda, const PirlsOptions& options) {
    check_inputs(x, y, weights, family);
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error("smoothing parameter must be finite and >= 0");
    if (unique_sorted(x).size() < 2) throw Error("penalized fit needs at least 2 distinct positions");

    const auto n = static_cast<Eigen::Index>(y.size());
    const bool tweedie = family.kind == Family::Kind::Tweedie;
    const Eigen::MatrixXd b = basis->design_matrix(x);

    Eigen::VectorXd omega_w(n), mu(n), eta(n);
    const double ybar = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        omega_w[i] = weight_at(weights, u);
        mu[i] = tweedie ? std::max(y[u], ybar / 10.0) : y[u];
        eta[i] = family.link(mu[i]);
    }

    const double floor = 1e-10 * null_deviance(y, weights, family) + std::numeric_limits<double>::min();
    std::vector<double> mu_vec(y.size());
    auto deviance_of = [&](const Eigen::VectorXd& m) {
        for (Eigen::Index i = 0; i < n; ++i) mu_vec[static_cast<std::size_t>(i)] = m[i];
        return family.deviance(y, mu_vec, weights);
    };

    SmoothFit fit;
    fit.basis = basis;
    fit.family = family;
    fit.lambda = lambda;

    Eigen::VectorXd z(n), w(n), beta;
    double dev = 0.0;
    double pen_old = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto u = static_cast<std::size_t>(i);
            if (tweedie) {
                z[i] = eta[i] + (y[u] - mu[i]) / mu[i];
                w[i] = omega_w[i] * std::pow(mu[i], 2.0 - family.power);
            } else {
                z[i] = y[u];
                w[i] = omega_w[i];
            }
        }
        Solved step = penalized_solve(b, w, z, root, lambda);
        Eigen::VectorXd eta_new = b * step.beta;
        Eigen::VectorXd mu_new = eta_new.unaryExpr([&](double e) { return family.inverse_link(e); });
        dev = deviance_of(mu_new);
        double pen = dev + lambda * (root * step.beta).squaredNorm();

        // Step halving on the penalized deviance guards against overshoot.
        for (int half = 0; half < 30 && beta.size() > 0 && !(pen <= pen_old * (1.0 + 1e-12) + floor); ++half) {
            step.beta = 0.5 * (step.beta + beta);
            eta_new = b * step.beta;
            mu_new = eta_new.unaryExpr([&](double e) { return family.inverse_link(e); });
            dev = deviance_of(mu_new);
            pen = dev + lambda * (root * step.beta).squaredNorm();
        }

        const double eta_change = (eta_new - eta).cwiseAbs().maxCoeff();
        beta = step.beta;
        eta = eta_new;
        mu = mu_new;
        fit.edf = step.edf;
        fit.iterations = iter;
        fit.deviance_trace.push_back(pen);

        if (!tweedie || std::abs(pen - pen_old) <= options.tolerance * (std::abs(pen) + floor) ||
            eta_change <= 1e-12 * (1.0 + eta.cwiseAbs().maxCoeff())) {
            converged = iter > 1 || !tweedie;
            if (converged) break;
        }
        pen_old = pen;
    }
    if (!converged) {
        std::ostringstream msg;
        msg << "penalized IRLS did not converge in " << options.max_iterations << " iterations (lambda=" << lambda
            << ", last penalized deviance=" << fit.deviance_trace.back() << ")";
        throw ConvergenceError(msg.str(), fit.deviance_trace);
    }
    if (!(fit.edf < static_cast<double>(n) + 1e-8)) fit.edf = static_cast<double>(n);

    fit.coefficients = beta;
    fit.deviance = dev;
    const double resid_df = static_cast<double>(n) - fit.edf;
    const double gcv_df = static_cast<double>(n) - options.gcv_gamma * fit.edf;
    fit.gcv_score = gcv_df > 1e-10 ? static_cast<double>(n) * fit.deviance / (gcv_df * gcv_df)
                                   : std::numeric_limits<double>::infinity();
    double pearson = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double r = y[static_cast<std::size_t>(i)] - mu[i];
        pearson += omega_w[i] * r * r / family.variance(mu[i]);
    }
    fit.dispersion = resid_df > 1e-10 ? pearson / resid_df : std::numeric_limits<double>::quiet_NaN();
    return fit;
}

std::vector<double> lambda_grid(double lo, double hi, int count) {
    if (!(lo > 0.0) || !(hi >= lo) || count < 1) throw Error("lambda grid needs 0 < lo <= hi and count >= 1");
    std::vector<double> grid(static_cast<std::size_t>(count));
    if (count == 1) {
        grid[0] = lo;
        return grid;
    }
    const double a = std::log10(lo), b = std::log10(hi);
    for (int i = 0; i < count; ++i) grid[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (count - 1));
    grid.back() = hi;
    return grid;
}

namespace {

struct GridRun {
    std::vector<SmoothFit> fits;  // empty coefficient vector marks a failed fit
    std::string last_error;
    double null_gcv = 0.0;
};

GridRun run_grid(std::span<const double> x, std::span<const double> y, std::span<const double> weights,
                 const Family& family, std::span<const double> grid, const PirlsOptions& options) {
    if (grid.empty()) throw Error("lambda grid is empty");
    check_inputs(x, y, weights, family);
    const auto knots = unique_sorted(x);
    if (knots.size() < 2) throw Error("penalized fit needs at least 2 distinct positions");
    auto basis = std::make_shared<const BSplineBasis>(knots);
    const Eigen::MatrixXd root = basis->penalty_root();

    GridRun run;
    const double n = static_cast<double>(y.size());
    run.null_gcv = n * null_deviance(y, weights, family) / ((n - 1.0) * (n - 1.0));
    for (double lambda : grid) {
        try {
            run.fits.push_back(fit_pirls(basis, root, x, y, weights, family, lambda, options));
        } catch (const Error& e) {
            run.last_error = e.what();
            run.fits.emplace_back();
        }
    }
    return run;
}

}  // namespace

SmoothFit select_lambda_gcv(std::span<const double> x, std::span<const double> y, std::span<const double> weights,
                            const Family& family, std::span<const double> grid, const PirlsOptions& options) {
    std::vector<std::size_t> order(grid.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return grid[a] < grid[b]; });
    std::vector<double> ascending;
    for (auto i : order) ascending.push_back(grid[i]);

    GridRun run = run_grid(x, y, weights, family, ascending, options);
    const double tie = 1e-12 * run.null_gcv;
    const SmoothFit* best = nullptr;
    for (const auto& fit : run.fits) {
        if (fit.coefficients.size() == 0 || std::isnan(fit.gcv_score)) continue;
        if (!best || fit.gcv_score <= best->gcv_score + tie) best = &fit;
    }
    if (!best) throw Error("no smoothing parameter on the grid produced a fit: " + run.last_error);
    return *best;
}

std::vector<double> gcv_profile(std::span<const double> x, std::span<const double> y,
                                std::span<const double> weights, const Family& family,
                                std::span<const double> grid, const PirlsOptions& options) {
    GridRun run = run_grid(x, y, weights, family, grid, options);
    std::vector<double> scores;
    for (const auto& fit : run.fits)
        scores.push_back(fit.coefficients.size() ? fit.gcv_score : std::numeric_limits<double>::quiet_NaN());
    return scores;
}

double predict(const SmoothFit& fit, double x, Scale what) {
    const double eta = fit.linear_predictor(x);
    return what == Scale::Linear ? eta : fit.family.inverse_link(eta);
}

std::vector<DiagnosticRow> diagnostics(const SmoothFit& fit, std::span<const double> x, std::span<const double> y,
                                       std::span<const double> weights) {
    if (x.size() != y.size()) throw Error("x and y differ in length");
    std::vector<DiagnosticRow> rows;
    rows.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double eta = fit.linear_predictor(x[i]);
        const double mu = fit.family.inverse_link(eta);
        const double r = std::sqrt(weight_at(weights, i)) * (y[i] - mu) / std::sqrt(fit.family.variance(mu));
        rows.push_back({x[i], y[i], eta, mu, r});
    }
    return rows;
}

}  // namespace lograt
