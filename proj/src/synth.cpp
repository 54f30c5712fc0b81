#include "lograt/synth.hpp"

#include "lograt/error.hpp"
#include "lograt/format.hpp"

#include <json.hpp>

#include <array>
#include <cmath>
#include <ostream>
#include <random>
#include <set>

namespace lograt {

namespace {

constexpr std::array<const char*, 30> kSymbols{"Co", "Al", "Fe", "Ce", "Th", "Cr", "La", "Nd", "As", "Au",
                                               "Bi", "Ni", "Cu", "Pb", "Se", "Ag", "Sc", "Ti", "U",  "V",
                                               "Y",  "Mo", "Na", "Ba", "S",  "W",  "Tl", "Zn", "Mn", "K"};

}  // namespace

std::string synthetic_symbol(std::size_t index) {
    return index < kSymbols.size() ? kSymbols[index] : "E" + std::to_string(index + 1);
}

void SyntheticSpec::validate() const {
    if (samples < 4) throw Error("synthetic transect needs at least 4 samples");
    if (elements < 2) throw Error("synthetic transect needs at least 2 elements");
    if (baseline.empty() || (baseline.size() != 1 && baseline.size() != elements))
        throw Error("baseline must hold 1 or `elements` values");
    for (double b : baseline)
        if (!(b > 0.0) || !std::isfinite(b)) throw Error("baselines must be positive");
    if (!(noise >= 0.0) || !std::isfinite(noise)) throw Error("noise must be >= 0");
    if (!(extent > 0.0)) throw Error("extent must be positive");
    for (const auto& a : anomalies) {
        if (a.element >= elements) throw Error("anomaly refers to element " + std::to_string(a.element));
        if (!(a.center >= 0.0 && a.center <= 1.0)) throw Error("anomaly center must lie in [0,1]");
        if (!(a.width > 0.0)) throw Error("anomaly width must be positive");
        if (!(a.amplitude > 0.0)) throw Error("anomaly amplitude must be positive");
    }
}

double SyntheticSpec::baseline_of(std::size_t element) const {
    return baseline.size() == 1 ? baseline.front() : baseline.at(element);
}

std::vector<std::string> GroundTruth::anomalous_elements() const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& a : anomalies)
        if (seen.insert(a.element).second) out.push_back(a.element);
    return out;
}

double anomaly_profile(const SyntheticSpec& spec, std::size_t element, double x) {
    double s = 1.0;
    for (const auto& a : spec.anomalies) {
        if (a.element != element) continue;
        const double u = (x - a.center) / a.width;
        s += a.amplitude / (1.0 + u * u);
    }
    return s;
}

SyntheticDataset generate(const SyntheticSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    SyntheticDataset out;
    RawSampleTable& t = out.table;
    t.coordinate_kind = CoordinateKind::Distance;
    for (std::size_t j = 0; j < spec.elements; ++j) t.elements.push_back(synthetic_symbol(j));
    t.concentrations.assign(spec.elements, {});

    const double last = static_cast<double>(spec.samples - 1);
    for (std::size_t i = 0; i < spec.samples; ++i) {
        const double x = static_cast<double>(i) / last;
        t.sample_ids.push_back("s" + std::to_string(i + 1));
        t.distances.push_back(x * spec.extent);
        for (std::size_t j = 0; j < spec.elements; ++j) {
            const double z = normal(rng);
            t.concentrations[j].push_back(spec.baseline_of(j) * anomaly_profile(spec, j, x) *
                                          std::exp(spec.noise * z));
        }
    }
    for (const auto& a : spec.anomalies)
        out.truth.anomalies.push_back(
            {synthetic_symbol(a.element), a.center, a.center * spec.extent, a.width, a.amplitude});
    out.dataset = make_dataset(t);
    return out;
}

void write_table_csv(std::ostream& out, const RawSampleTable& table) {
    const bool planar = table.coordinate_kind == CoordinateKind::EastNorth;
    out << "id" << (planar ? ",east,north" : ",x");
    for (const auto& e : table.elements) out << ',' << e;
    out << '\n';
    for (std::size_t i = 0; i < table.size(); ++i) {
        out << table.sample_ids[i];
        if (planar)
            out << ',' << format_number(table.coordinates[i][0]) << ',' << format_number(table.coordinates[i][1]);
        else
            out << ',' << format_number(table.distances[i]);
        for (const auto& column : table.concentrations) out << ',' << format_number(column[i]);
        out << '\n';
    }
}

void write_truth_json(std::ostream& out, const GroundTruth& truth, const SyntheticSpec& spec) {
    nlohmann::ordered_json j;
    j["samples"] = spec.samples;
    j["elements"] = spec.elements;
    j["noise"] = spec.noise;
    j["seed"] = spec.seed;
    j["extent"] = spec.extent;
    j["anomalous_elements"] = truth.anomalous_elements();
    j["anomalies"] = nlohmann::ordered_json::array();
    for (const auto& a : truth.anomalies) {
        j["anomalies"].push_back({{"element", a.element},
                                  {"center", a.center},
                                  {"center_distance", a.center_distance},
                                  {"width", a.width},
                                  {"amplitude", a.amplitude}});
    }
    out << j.dump(2) << '\n';
}

}  // namespace lograt
