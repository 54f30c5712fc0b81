#include "lograt/curvature.hpp"

#include "lograt/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lograt {

EvaluationGrid EvaluationGrid::uniform(std::size_t n, double epsilon, double lo, double hi) {
    if (n < 100) throw Error("evaluation grid needs at least 100 points");
    if (!(epsilon > 0.0) || !(epsilon < 0.5)) throw Error("finite-difference step must lie in (0, 0.5)");
    if (!(hi > lo)) throw Error("evaluation grid needs hi > lo");
    EvaluationGrid grid;
    grid.epsilon = epsilon;
    grid.points.resize(n);
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) grid.points[i] = lo + step * static_cast<double>(i);
    grid.points.back() = hi;
    return grid;
}

ElementCurve numeric_derivatives(const std::function<double(double)>& f, const EvaluationGrid& grid,
                                 std::string name) {
    const double e = grid.epsilon;
    if (!(e > 0.0)) throw Error("finite-difference step must be positive");
    ElementCurve out;
    out.element = std::move(name);
    out.value.reserve(grid.size());
    out.d1.reserve(grid.size());
    out.d2.reserve(grid.size());
    for (double x : grid.points) {
        const double lo = f(x - e), mid = f(x), hi = f(x + e);
        out.value.push_back(mid);
        out.d1.push_back((hi - lo) / (2.0 * e));
        out.d2.push_back((hi - 2.0 * mid + lo) / (e * e));
    }
    return out;
}

ElementCurve numeric_derivatives(const SmoothFit& fit, const EvaluationGrid& grid) {
    return numeric_derivatives([&fit](double x) { return fit.response(x); }, grid, fit.element);
}

ElementCurve analytic_derivatives(const SmoothFit& fit, const EvaluationGrid& grid) {
    if (fit.family.kind != Family::Kind::Tweedie) throw Error("analytic response derivatives assume the log link");
    ElementCurve out;
    out.element = fit.element;
    for (double x : grid.points) {
        const double f = fit.response(x);
        const double e1 = fit.basis->evaluate(fit.coefficients, x, 1);
        const double e2 = fit.basis->evaluate(fit.coefficients, x, 2);
        out.value.push_back(f);
        out.d1.push_back(e1 * f);
        out.d2.push_back((e2 + e1 * e1) * f);
    }
    return out;
}

ElementCurve sample_curve(const SmoothFit& fit, const EvaluationGrid& grid, DerivativeMethod method) {
    return method == DerivativeMethod::Analytic ? analytic_derivatives(fit, grid) : numeric_derivatives(fit, grid);
}

LogRatioCurve log_ratio_curve(const ElementCurve& first, const ElementCurve& second, const EvaluationGrid& grid) {
    const std::size_t n = grid.size();
    if (first.value.size() != n || second.value.size() != n) throw Error("curves were sampled on a different grid");

    LogRatioCurve c;
    c.numerator = first.element;
    c.denominator = second.element;
    c.x = grid.points;
    c.g.resize(n);
    c.d1.resize(n);
    c.d2.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double fa = first.value[i], fb = second.value[i];
        if (!(fa > 0.0) || !(fb > 0.0)) throw Error("log-ratio needs positive fitted curves");
        const double ra = first.d1[i] / fa, rb = second.d1[i] / fb;
        // Grouped per element so that swapping the pair negates g', g'' exactly.
        const double qa = first.d2[i] / fa - ra * ra;
        const double qb = second.d2[i] / fb - rb * rb;
        c.g[i] = std::log(fa) - std::log(fb);
        c.d1[i] = ra - rb;
        c.d2[i] = qa - qb;
    }
    const auto [lo, hi] = std::minmax_element(c.g.begin(), c.g.end());
    const double range = *hi - *lo;
    c.shift = *lo;
    c.constant = !(range > 1e-10 * std::max({1.0, std::abs(*lo), std::abs(*hi)}));
    c.scale = c.constant ? 1.0 : 1.0 / range;
    return c;
}

LogRatioCurve log_ratio_curve(const SmoothFit& first, const SmoothFit& second, const EvaluationGrid& grid,
                              DerivativeMethod method) {
    return log_ratio_curve(sample_curve(first, grid, method), sample_curve(second, grid, method), grid);
}

std::vector<double> curvature(std::span<const double> d1, std::span<const double> d2, double scale) {
    if (d1.size() != d2.size()) throw Error("derivative vectors differ in length");
    std::vector<double> kappa(d1.size());
    for (std::size_t i = 0; i < d1.size(); ++i) {
        const double s1 = scale * d1[i];
        kappa[i] = std::abs(scale * d2[i]) / std::pow(1.0 + s1 * s1, 1.5);
    }
    return kappa;
}

std::vector<double> curvature(const LogRatioCurve& curve) { return curvature(curve.d1, curve.d2, curve.scale); }

double threshold(std::span<const double> kappa) {
    if (kappa.empty()) throw Error("threshold of an empty curvature vector");
    const double n = static_cast<double>(kappa.size());
    const double mean = std::accumulate(kappa.begin(), kappa.end(), 0.0) / n;
    double ss = 0.0;
    for (double k : kappa) ss += (k - mean) * (k - mean);
    return mean + std::sqrt(ss / n);
}

std::vector<double> crossing_set(std::span<const double> kappa, double threshold, std::span<const double> x) {
    const std::size_t n = kappa.size();
    if (x.size() != n) throw Error("curvature and grid differ in length");
    std::vector<double> out;
    if (n == 0) return out;

    const auto [lo, hi] = std::minmax_element(kappa.begin(), kappa.end());
    if (*hi - *lo <= 1e-12 * std::max(1.0, std::abs(*hi))) return out;

    auto cross = [&](std::size_t i) {  // threshold crossing between samples i and i+1
        const double k0 = kappa[i], k1 = kappa[i + 1];
        if (k0 == threshold) return x[i];
        if (k1 == threshold) return x[i + 1];
        return x[i] + (threshold - k0) / (k1 - k0) * (x[i + 1] - x[i]);
    };

    // A run is a maximal block of samples strictly above the threshold; an
    // endpoint sitting exactly on it joins the adjacent run.
    bool inside = kappa[0] > threshold || (n > 1 && kappa[0] == threshold && kappa[1] > threshold);
    if (inside) out.push_back(x[0]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const bool next = kappa[i + 1] > threshold || (i + 2 == n && inside && kappa[i + 1] == threshold);
        if (next != inside) out.push_back(cross(i));
        inside = next;
    }
    if (inside) out.push_back(x[n - 1]);
    return out;
}

std::vector<Interval> exceedance_intervals(std::span<const double> kappa, std::span<const double> x,
                                           double threshold, std::span<const double> crossings) {
    if (crossings.size() % 2 != 0) throw Error("crossing set must have even cardinality");
    if (x.size() != kappa.size()) throw Error("curvature and grid differ in length");
    std::vector<Interval> out;
    for (std::size_t l = 0; l < crossings.size(); l += 2) {
        Interval iv;
        iv.start = crossings[l];
        iv.end = crossings[l + 1];
        iv.peak_position = 0.5 * (iv.start + iv.end);
        auto first = std::lower_bound(x.begin(), x.end(), iv.start);
        for (auto it = first; it != x.end() && *it <= iv.end; ++it) {
            const auto i = static_cast<std::size_t>(it - x.begin());
            const double excess = std::max(kappa[i] - threshold, 0.0);
            if (excess * excess > iv.peak_excess) {
                iv.peak_excess = excess * excess;
                iv.peak_position = x[i];
            }
        }
        out.push_back(iv);
    }
    return out;
}

double c_value(std::span<const double> kappa, std::span<const double> x, double threshold,
               std::span<const double> crossings) {
    const auto intervals = exceedance_intervals(kappa, x, threshold, crossings);
    if (intervals.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& iv : intervals) sum += iv.peak_excess;
    return sum / static_cast<double>(intervals.size());
}

CurvatureProfile curvature_profile(LogRatioCurve curve) {
    CurvatureProfile p;
    p.kappa = curvature(curve);
    p.threshold = threshold(p.kappa);
    if (!curve.constant) {
        p.crossings = crossing_set(p.kappa, p.threshold, curve.x);
        p.intervals = exceedance_intervals(p.kappa, curve.x, p.threshold, p.crossings);
        double sum = 0.0;
        for (const auto& iv : p.intervals) sum += iv.peak_excess;
        p.c_value = p.intervals.empty() ? 0.0 : sum / static_cast<double>(p.intervals.size());
    }
    p.curve = std::move(curve);
    return p;
}

CurvatureProfile analyze_pair(const ElementCurve& first, const ElementCurve& second, const EvaluationGrid& grid) {
    return curvature_profile(log_ratio_curve(first, second, grid));
}

std::vector<Interval> detect_intervals(const CurvatureProfile& profile, double distance_min, double distance_max) {
    const double span = distance_max - distance_min;
    std::vector<Interval> out = profile.intervals;
    for (auto& iv : out) {
        iv.start = distance_min + iv.start * span;
        iv.end = distance_min + iv.end * span;
        iv.peak_position = distance_min + iv.peak_position * span;
    }
    return out;
}

}  // namespace lograt
