#include "lograt/curvature.hpp"
#include "lograt/error.hpp"
#include "lograt/gam.hpp"
#include "lograt/ingest.hpp"
#include "lograt/ranking.hpp"
#include "lograt/report.hpp"
#include "lograt/synth.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

namespace py = pybind11;
using namespace lograt;

namespace {

Scale parse_scale(const std::string& s) {
    if (s == "response") return Scale::Response;
    if (s == "linear") return Scale::Linear;
    throw Error("scale must be 'response' or 'linear'");
}

py::dict profile_dict(const CurvatureProfile& p) {
    py::list intervals;
    for (const auto& iv : p.intervals)
        intervals.append(py::dict(py::arg("start") = iv.start, py::arg("end") = iv.end,
                                  py::arg("peak_position") = iv.peak_position, py::arg("peak_excess") = iv.peak_excess));
    return py::dict(py::arg("pair") = p.curve.numerator + "/" + p.curve.denominator, py::arg("x") = p.curve.x,
                    py::arg("g") = p.curve.g, py::arg("kappa") = p.kappa, py::arg("threshold") = p.threshold,
                    py::arg("crossings") = p.crossings, py::arg("intervals") = intervals,
                    py::arg("c_value") = p.c_value);
}

TransectDataset dataset_from_arrays(const std::vector<double>& distances, const std::vector<std::string>& elements,
                                    const std::vector<std::vector<double>>& values) {
    RawSampleTable t;
    t.distances = distances;
    t.elements = elements;
    t.concentrations = values;
    for (std::size_t i = 0; i < distances.size(); ++i) t.sample_ids.push_back("s" + std::to_string(i + 1));
    return make_dataset(t);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Curvature ranking of element log-ratios along a transect";

    auto base = py::register_exception<Error>(m, "Error", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());

    py::class_<SmoothFit>(m, "SmoothFit")
        .def_readonly("element", &SmoothFit::element)
        .def_readonly("lam", &SmoothFit::lambda)
        .def_readonly("edf", &SmoothFit::edf)
        .def_readonly("deviance", &SmoothFit::deviance)
        .def_readonly("gcv_score", &SmoothFit::gcv_score)
        .def_readonly("dispersion", &SmoothFit::dispersion)
        .def_readonly("iterations", &SmoothFit::iterations)
        .def_readonly("deviance_trace", &SmoothFit::deviance_trace)
        .def_readonly("coefficients", &SmoothFit::coefficients)
        .def_property_readonly("breakpoints", [](const SmoothFit& f) { return f.basis->breakpoints(); })
        .def(
            "predict",
            [](const SmoothFit& f, const std::vector<double>& x, const std::string& scale) {
                const Scale s = parse_scale(scale);
                std::vector<double> out;
                out.reserve(x.size());
                for (double v : x) out.push_back(predict(f, v, s));
                return out;
            },
            py::arg("x"), py::arg("scale") = "response")
        .def("__repr__", [](const SmoothFit& f) {
            return "<SmoothFit " + f.element + " lambda=" + std::to_string(f.lambda) + " edf=" + std::to_string(f.edf) +
                   ">";
        });

    m.def(
        "fit",
        [](const std::vector<double>& x, const std::vector<double>& y, std::optional<std::vector<double>> weights,
           std::optional<double> lam, double tweedie_power, double gcv_gamma) {
            const std::vector<double> w = weights.value_or(std::vector<double>{});
            const Family fam = Family::tweedie(tweedie_power);
            PirlsOptions opts;
            opts.gcv_gamma = gcv_gamma;
            py::gil_scoped_release release;
            if (lam) return fit_pirls(x, y, w, fam, *lam, opts);
            return select_lambda_gcv(x, y, w, fam, lambda_grid(), opts);
        },
        py::arg("x"), py::arg("y"), py::arg("weights") = py::none(), py::arg("lam") = py::none(),
        py::arg("tweedie_power") = 1.5, py::arg("gcv_gamma") = 1.4,
        "Penalized Tweedie spline fit; GCV over the default lambda grid unless lam is given.");

    m.def(
        "tweedie_deviance",
        [](const std::vector<double>& y, const std::vector<double>& mu, double p,
           std::optional<std::vector<double>> w) { return tweedie_deviance(y, mu, p, w.value_or(std::vector<double>{})); },
        py::arg("y"), py::arg("mu"), py::arg("p") = 1.5, py::arg("weights") = py::none());

    m.def(
        "curvature", [](const std::vector<double>& d1, const std::vector<double>& d2,
                        double scale) { return curvature(d1, d2, scale); },
        py::arg("d1"), py::arg("d2"), py::arg("scale") = 1.0);
    m.def("threshold", [](const std::vector<double>& kappa) { return threshold(kappa); }, py::arg("kappa"));
    m.def(
        "crossing_set",
        [](const std::vector<double>& kappa, double thr, const std::vector<double>& x) {
            return crossing_set(kappa, thr, x);
        },
        py::arg("kappa"), py::arg("threshold"), py::arg("x"));
    m.def(
        "c_value",
        [](const std::vector<double>& kappa, const std::vector<double>& x, double thr,
           const std::vector<double>& crossings) { return c_value(kappa, x, thr, crossings); },
        py::arg("kappa"), py::arg("x"), py::arg("threshold"), py::arg("crossings"));

    m.def(
        "pair_profile",
        [](const SmoothFit& a, const SmoothFit& b, std::size_t grid_points, double epsilon) {
            const auto grid = EvaluationGrid::uniform(grid_points, epsilon);
            return profile_dict(analyze_pair(numeric_derivatives(a, grid), numeric_derivatives(b, grid), grid));
        },
        py::arg("first"), py::arg("second"), py::arg("grid_points") = EvaluationGrid::default_size,
        py::arg("epsilon") = EvaluationGrid::default_epsilon);

    m.def(
        "rank",
        [](const std::vector<double>& distances, const std::vector<std::string>& elements,
           const std::vector<std::vector<double>>& values, std::size_t top_k, std::size_t grid_points, unsigned threads) {
            RunConfig c;
            c.top_k = top_k;
            c.grid_points = grid_points;
            c.threads = threads;
            c.validate();
            MaterialResult r;
            {
                py::gil_scoped_release release;
                r = analyze_material("arrays", dataset_from_arrays(distances, elements, values), c);
            }
            py::list out;
            for (const auto& p : r.ranked)
                out.append(py::make_tuple(p.first, p.second, p.c_value, p.scaled_c_value));
            return out;
        },
        py::arg("distances"), py::arg("elements"), py::arg("values"), py::arg("top_k") = 10,
        py::arg("grid_points") = EvaluationGrid::default_size, py::arg("threads") = 1,
        "Ranked (first, second, c, scaled c) for a table given as one value list per element.");

    m.def(
        "synth",
        [](std::size_t samples, std::size_t elements, const std::vector<std::tuple<std::size_t, double, double, double>>& anomalies,
           double noise, std::uint64_t seed) {
            SyntheticSpec s;
            s.samples = samples;
            s.elements = elements;
            s.noise = noise;
            s.seed = seed;
            for (const auto& [e, c, w, a] : anomalies) s.anomalies.push_back({e, c, w, a});
            const auto d = generate(s);
            return py::dict(py::arg("distances") = d.table.distances, py::arg("elements") = d.table.elements,
                            py::arg("values") = d.table.concentrations,
                            py::arg("anomalous") = d.truth.anomalous_elements());
        },
        py::arg("samples") = 30, py::arg("elements") = 6, py::arg("anomalies") = std::vector<std::tuple<std::size_t, double, double, double>>{},
        py::arg("noise") = 0.0, py::arg("seed") = 42,
        "Synthetic transect; anomalies are (element index, center, width, amplitude).");
}
