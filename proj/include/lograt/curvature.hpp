#pragma once

// Curvature of shifted/scaled log-ratios of two fitted concentration curves,
// the mean-plus-sd exceedance threshold, the crossing set and the c-value.

#include "lograt/gam.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace lograt {

/// Equispaced evaluation points plus the finite-difference step.
struct EvaluationGrid {
    std::vector<double> points;
    double epsilon = 1e-3;

    static constexpr std::size_t default_size = 3000;
    static constexpr double default_epsilon = 1e-3;

    /// N >= 100 points spanning [lo, hi] inclusive.
    static EvaluationGrid uniform(std::size_t n = default_size, double epsilon = default_epsilon, double lo = 0.0,
                                  double hi = 1.0);

    std::size_t size() const noexcept { return points.size(); }
};

enum class DerivativeMethod { FiniteDifference, Analytic };

/// A fitted curve on the response scale sampled on a grid, with derivatives.
struct ElementCurve {
    std::string element;
    std::vector<double> value;
    std::vector<double> d1;
    std::vector<double> d2;
};

/// Central differences (f(x+e)-f(x-e))/2e and (f(x+e)-2f(x)+f(x-e))/e^2.
ElementCurve numeric_derivatives(const std::function<double(double)>& f, const EvaluationGrid& grid,
                                 std::string name = {});
ElementCurve numeric_derivatives(const SmoothFit& fit, const EvaluationGrid& grid);

/// Exact spline derivatives through the chain rule f' = eta' f, f'' = (eta'' + eta'^2) f.
ElementCurve analytic_derivatives(const SmoothFit& fit, const EvaluationGrid& grid);

ElementCurve sample_curve(const SmoothFit& fit, const EvaluationGrid& grid,
                          DerivativeMethod method = DerivativeMethod::FiniteDifference);

/// g = log f1 - log f2 with g', g'' from the quotient expressions.
struct LogRatioCurve {
    std::string numerator;
    std::string denominator;
    std::vector<double> x;
    std::vector<double> g;
    std::vector<double> d1;
    std::vector<double> d2;
    double shift = 0.0;  // min g
    double scale = 1.0;  // 1 / (max g - min g), or 1 for a constant curve
    bool constant = false;

    double scaled(std::size_t i) const { return scale * (g[i] - shift); }
};

LogRatioCurve log_ratio_curve(const ElementCurve& first, const ElementCurve& second, const EvaluationGrid& grid);
LogRatioCurve log_ratio_curve(const SmoothFit& first, const SmoothFit& second, const EvaluationGrid& grid,
                              DerivativeMethod method = DerivativeMethod::FiniteDifference);

/// kappa = |c g''| / (1 + (c g')^2)^(3/2), pointwise.
std::vector<double> curvature(std::span<const double> d1, std::span<const double> d2, double scale);
std::vector<double> curvature(const LogRatioCurve& curve);

/// Mean plus population standard deviation of kappa over the grid.
double threshold(std::span<const double> kappa);

/// Ordered crossing positions of kappa with the threshold, alternating up/down.
/// Grid endpoints at or above the threshold open/close a run. Crossings between
/// samples are linearly interpolated. Nearly constant kappa gives an empty set.
std::vector<double> crossing_set(std::span<const double> kappa, double threshold, std::span<const double> x);

struct Interval {
    double start = 0.0;
    double end = 0.0;
    double peak_position = 0.0;
    /// max over grid samples inside [start, end] of (kappa - threshold)_+^2.
    double peak_excess = 0.0;

    double width() const noexcept { return end - start; }
    bool contains(double v) const noexcept { return v >= start && v <= end; }
};

std::vector<Interval> exceedance_intervals(std::span<const double> kappa, std::span<const double> x,
                                           double threshold, std::span<const double> crossings);

/// Mean over consecutive crossing pairs of the squared peak excess; 0 if no crossings.
double c_value(std::span<const double> kappa, std::span<const double> x, double threshold,
               std::span<const double> crossings);

struct CurvatureProfile {
    LogRatioCurve curve;
    std::vector<double> kappa;
    double threshold = 0.0;
    std::vector<double> crossings;
    std::vector<Interval> intervals;
    double c_value = 0.0;
};

CurvatureProfile curvature_profile(LogRatioCurve curve);
CurvatureProfile analyze_pair(const ElementCurve& first, const ElementCurve& second, const EvaluationGrid& grid);

/// Exceedance windows mapped from [0,1] positions back to transect units.
std::vector<Interval> detect_intervals(const CurvatureProfile& profile, double distance_min = 0.0,
                                       double distance_max = 1.0);

}  // namespace lograt
