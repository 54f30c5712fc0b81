#pragma once

// Penalized quasi-likelihood smoothing of one element's concentrations along
// the transect: log-link Tweedie (variance mu^p) fitted by penalized IRLS,
// smoothing parameter chosen by GCV over a log-spaced grid.

#include "lograt/spline.hpp"

#include <Eigen/Core>

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace lograt {

/// Quasi-likelihood family. Tweedie uses the log link; Gaussian uses the
/// identity link and exists as a linear-algebra reference.
struct Family {
    enum class Kind { Tweedie, Gaussian };

    Kind kind = Kind::Tweedie;
    double power = 1.5;

    static Family tweedie(double p = 1.5);
    static Family gaussian() { return Family{Kind::Gaussian, 0.0}; }

    double variance(double mu) const;
    double link(double mu) const;
    double inverse_link(double eta) const;
    /// Weighted deviance contribution summed over observations.
    double deviance(std::span<const double> y, std::span<const double> mu, std::span<const double> weights) const;
};

/// D = 2 sum w [ y (y^(1-p) - mu^(1-p)) / (1-p) - (y^(2-p) - mu^(2-p)) / (2-p) ].
/// Empty `weights` means unit weights.
double tweedie_deviance(std::span<const double> y, std::span<const double> mu, double p,
                        std::span<const double> weights = {});

struct PirlsOptions {
    double tolerance = 1e-8;
    int max_iterations = 100;
    /// Inflation of the effective degrees of freedom in n D / (n - gamma edf)^2.
    double gcv_gamma = 1.0;
};

struct SmoothFit {
    std::string element;
    std::shared_ptr<const BSplineBasis> basis;
    Family family;
    Eigen::VectorXd coefficients;
    double lambda = 0.0;
    double edf = 0.0;
    double deviance = 0.0;
    double gcv_score = 0.0;
    /// Pearson statistic / (n - edf); diagnostic only.
    double dispersion = 0.0;
    int iterations = 0;
    /// Penalized deviance D + lambda b' S b after each IRLS iteration.
    std::vector<double> deviance_trace;

    double linear_predictor(double x) const { return basis->evaluate(coefficients, x, 0); }
    double response(double x) const { return family.inverse_link(linear_predictor(x)); }
};

enum class Scale { Response, Linear };

SmoothFit fit_pirls(std::span<const double> x, std::span<const double> y, std::span<const double> weights,
                    const Family& family, double lambda, const PirlsOptions& options = {});

/// Same as above on a prebuilt basis (knots at the unique x) and its penalty_root().
SmoothFit fit_pirls(std::shared_ptr<const BSplineBasis> basis, const Eigen::MatrixXd& root,
                    std::span<const double> x, std::span<const double> y, std::span<const double> weights,
                    const Family& family, double lambda, const PirlsOptions& options = {});

/// `count` values log-spaced over [lo, hi], ascending.
std::vector<double> lambda_grid(double lo = 1e-6, double hi = 1e4, int count = 40);

/// Fit at every grid value and return the GCV minimizer n D / (n - gamma edf)^2.
/// Near-ties (within 1e-12 of the intercept-only GCV scale) go to the larger lambda.
SmoothFit select_lambda_gcv(std::span<const double> x, std::span<const double> y, std::span<const double> weights,
                            const Family& family, std::span<const double> grid, const PirlsOptions& options = {});

/// Per-fit GCV scores for every grid value, in grid order. Failed fits are NaN.
std::vector<double> gcv_profile(std::span<const double> x, std::span<const double> y,
                                std::span<const double> weights, const Family& family,
                                std::span<const double> grid, const PirlsOptions& options = {});

double predict(const SmoothFit& fit, double x, Scale what = Scale::Response);

struct DiagnosticRow {
    double x, y, eta, mu, pearson_residual;
};

/// Observation-level residual table for linear-predictor-vs-residual plots.
std::vector<DiagnosticRow> diagnostics(const SmoothFit& fit, std::span<const double> x, std::span<const double> y,
                                       std::span<const double> weights);

}  // namespace lograt
