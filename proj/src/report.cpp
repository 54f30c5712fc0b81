#include "lograt/report.hpp"

#include "lograt/error.hpp"
#include "lograt/format.hpp"
#include "lograt/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace lograt {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

class Fnv1a {
public:
    void add(std::string_view s) {
        for (unsigned char ch : s) {
            state_ ^= ch;
            state_ *= 0x100000001b3ULL;
        }
        add_separator();
    }
    void add(double v) { add(format_number(v)); }
    void add_separator() {
        state_ ^= 0x1f;
        state_ *= 0x100000001b3ULL;
    }
    std::string hex() const {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016" PRIx64, state_);
        return buf;
    }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string sanitize(const std::string& name) {
    std::string out;
    for (char ch : name) out += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_') ? ch : '_';
    return out.empty() ? "_" : out;
}

std::string header(const std::string& kind, const std::string& hash) {
    return "# lograt " + kind + " config=" + hash + "\n";
}

void write_text(const fs::path& path, const std::string& text, std::ostream& log) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
    log << "wrote " << path.string() << '\n';
}

template <class Writer>
void write_with(const fs::path& path, std::ostream& log, Writer&& writer) {
    std::ostringstream ss;
    writer(ss);
    write_text(path, ss.str(), log);
}

std::vector<MaterialInput> selected_inputs(const RunConfig& config) {
    if (config.inputs.empty()) throw Error("no input tables configured (use --input name=path)");
    if (config.material.empty()) return config.inputs;
    for (const auto& in : config.inputs)
        if (in.name == config.material) return {in};
    throw Error("material '" + config.material + "' is not among the configured inputs");
}

std::vector<double> known_locations(const RunConfig& config) {
    std::vector<double> out = config.known_locations;
    if (!config.known_file.empty()) {
        std::istringstream in(read_file(config.known_file));
        std::string line;
        while (std::getline(in, line)) {
            if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream fields(line);
            std::string tok;
            while (fields >> tok) {
                try {
                    std::size_t used = 0;
                    const double v = std::stod(tok, &used);
                    if (used != tok.size()) throw std::invalid_argument(tok);
                    out.push_back(v);
                } catch (const std::exception&) {
                    throw Error("known-locations file: cannot parse '" + tok + "'");
                }
            }
        }
    }
    for (double v : out)
        if (!(v >= 0.0 && v <= 1.0)) throw Error("known locations must be normalized positions in [0,1]");
    return out;
}

std::string pair_stem(const CurvatureProfile& p) {
    return sanitize(p.curve.numerator) + "-" + sanitize(p.curve.denominator);
}

void write_fit_outputs(const MaterialResult& r, const fs::path& dir, const std::string& hash, std::ostream& log) {
    write_with(dir / "fits.csv", log, [&](std::ostream& o) { write_fit_table(o, r.fits, hash); });
    for (std::size_t e = 0; e < r.fits.size(); ++e) {
        const auto rows = diagnostics(r.fits[e], r.dataset.positions, r.dataset.values[e], r.dataset.weights[e]);
        write_with(dir / "diagnostics" / (sanitize(r.fits[e].element) + ".csv"), log,
                   [&](std::ostream& o) { write_diagnostics(o, rows, hash); });
    }
}

void write_rank_outputs(const MaterialResult& r, const fs::path& dir, const std::string& hash, std::ostream& log) {
    write_with(dir / "cvalues.csv", log, [&](std::ostream& o) { write_matrix_csv(o, r.matrix, hash); });
    write_with(dir / "cvalues.json", log, [&](std::ostream& o) { write_matrix_json(o, r.matrix, hash); });
    write_with(dir / "cvalues_scaled.csv", log, [&](std::ostream& o) { write_matrix_csv(o, r.scaled, hash); });
    write_with(dir / "cvalues_scaled.json", log, [&](std::ostream& o) { write_matrix_json(o, r.scaled, hash); });
    write_with(dir / "ranked.csv", log, [&](std::ostream& o) { write_ranked_csv(o, r.ranked, r.name, hash); });
    write_with(dir / "ranked.jsonl", log, [&](std::ostream& o) { write_ranked_json(o, r.ranked, r.name, hash); });
    write_with(dir / "frequency.csv", log,
               [&](std::ostream& o) { write_frequency_csv(o, r.frequency, r.name, hash); });
    write_with(dir / "frequency.jsonl", log,
               [&](std::ostream& o) { write_frequency_json(o, r.frequency, r.name, hash); });
}

void write_detect_outputs(const MaterialResult& r, const RunConfig& config, const fs::path& dir,
                          const std::string& hash, std::ostream& log) {
    const std::string pair = !config.pair.empty() ? config.pair
                             : !r.ranked.empty()  ? r.ranked.front().label()
                                                  : throw Error("no ranked pairs for material '" + r.name + "'");
    const CurvatureProfile profile = pair_profile(r, pair, config);
    const auto intervals = detect_intervals(profile, r.dataset.distance_min, r.dataset.distance_max);
    const auto known = known_locations(config);
    const auto hits = overlap_report(profile.intervals, known);
    const std::string stem = pair_stem(profile);

    write_with(dir / ("curve_" + stem + ".csv"), log, [&](std::ostream& o) { write_curve_dump(o, profile, hash); });
    write_text(dir / ("curve_" + stem + ".svg"), profile_svg(profile, known), log);
    write_with(dir / ("intervals_" + stem + ".csv"), log, [&](std::ostream& o) {
        o << header("intervals", hash) << "interval,start,end,start_normalized,end_normalized,peak_position,"
          << "peak_excess_squared\n";
        for (std::size_t i = 0; i < intervals.size(); ++i)
            o << i + 1 << ',' << format_number(intervals[i].start) << ',' << format_number(intervals[i].end) << ','
              << format_number(profile.intervals[i].start) << ',' << format_number(profile.intervals[i].end) << ','
              << format_number(intervals[i].peak_position) << ',' << format_number(intervals[i].peak_excess) << '\n';
    });
    write_with(dir / ("intervals_" + stem + ".json"), log, [&](std::ostream& o) {
        ordered_json j;
        j["config"] = hash;
        j["material"] = r.name;
        j["pair"] = profile.curve.numerator + "/" + profile.curve.denominator;
        j["threshold"] = profile.threshold;
        j["c_value"] = profile.c_value;
        j["crossings"] = profile.crossings;
        j["intervals"] = ordered_json::array();
        for (std::size_t i = 0; i < intervals.size(); ++i)
            j["intervals"].push_back({{"start", intervals[i].start},
                                      {"end", intervals[i].end},
                                      {"start_normalized", profile.intervals[i].start},
                                      {"end_normalized", profile.intervals[i].end},
                                      {"peak_position", intervals[i].peak_position},
                                      {"peak_excess_squared", intervals[i].peak_excess}});
        if (!known.empty()) {
            j["known_locations"] = ordered_json::array();
            std::size_t hit_count = 0;
            for (const auto& h : hits) {
                hit_count += h.hit;
                j["known_locations"].push_back(
                    {{"location", h.location}, {"hit", h.hit}, {"distance_to_interval", h.distance_to_interval}});
            }
            j["hits"] = hit_count;
            j["misses"] = hits.size() - hit_count;
        }
        o << j.dump(2) << '\n';
    });
    log << r.name << ": pair " << profile.curve.numerator << "/" << profile.curve.denominator << ", "
        << intervals.size() << " interval(s)";
    for (const auto& iv : intervals) log << " [" << format_number(iv.start) << ", " << format_number(iv.end) << "]";
    log << '\n';
    for (const auto& h : hits)
        log << "  known " << format_number(h.location) << ": " << (h.hit ? "hit" : "miss") << '\n';
}

void write_accumulated(const std::vector<MaterialResult>& results, const fs::path& out_dir, const std::string& hash,
                       bool heatmap, std::ostream& log) {
    if (results.size() < 2) return;
    std::vector<CValueMatrix> scaled;
    for (const auto& r : results) scaled.push_back(r.scaled);
    const CValueMatrix acc = accumulate(scaled);
    const fs::path dir = out_dir / "accumulated";
    write_with(dir / "cvalues_scaled.csv", log, [&](std::ostream& o) { write_matrix_csv(o, acc, hash); });
    write_with(dir / "cvalues_scaled.json", log, [&](std::ostream& o) { write_matrix_json(o, acc, hash); });
    if (heatmap) write_text(dir / "heatmap.svg", heatmap_svg(acc), log);
}

std::vector<MaterialResult> analyze_all(const std::vector<MaterialInput>& inputs, const RunConfig& config) {
    std::vector<MaterialResult> out;
    for (const auto& in : inputs) out.push_back(analyze_material(in, config));
    return out;
}

}  // namespace

void RunConfig::validate() const {
    (void)Family::tweedie(fit.tweedie_power);
    (void)lambda_grid(fit.lambda_min, fit.lambda_max, fit.lambda_count);
    if (fit.pirls.max_iterations < 1 || !(fit.pirls.tolerance > 0.0)) throw Error("invalid IRLS settings");
    if (!(fit.gcv_gamma >= 1.0 && fit.gcv_gamma <= 3.0)) throw Error("GCV gamma must lie in [1,3]");
    (void)EvaluationGrid::uniform(grid_points, epsilon);
    if (top_k < 1 || frequency_k < 1 || curve_k < 1) throw Error("top-k settings must be >= 1");
    if (threads < 1) throw Error("threads must be >= 1");
    for (double v : known_locations)
        if (!(v >= 0.0 && v <= 1.0)) throw Error("known locations must be normalized positions in [0,1]");
    for (std::size_t i = 0; i < inputs.size(); ++i)
        for (std::size_t j = i + 1; j < inputs.size(); ++j)
            if (inputs[i].name == inputs[j].name) throw Error("duplicate material name '" + inputs[i].name + "'");
}

std::string RunConfig::hash() const {
    Fnv1a h;
    h.add("lograt-config-v1");
    h.add(fit.tweedie_power);
    h.add(fit.lambda_min);
    h.add(fit.lambda_max);
    h.add(static_cast<double>(fit.lambda_count));
    h.add(fit.pirls.tolerance);
    h.add(static_cast<double>(fit.pirls.max_iterations));
    h.add(fit.gcv_gamma);
    h.add(static_cast<double>(grid_points));
    h.add(epsilon);
    h.add(derivatives == DerivativeMethod::Analytic ? "analytic" : "finite-difference");
    h.add(static_cast<double>(top_k));
    h.add(static_cast<double>(frequency_k));
    h.add(static_cast<double>(curve_k));
    h.add(std::string(1, format.delimiter));
    h.add(format.id_column);
    h.add(format.position_column);
    h.add(format.east_column);
    h.add(format.north_column);
    for (const auto& c : format.ignore_columns) h.add(c);
    h.add_separator();
    h.add(pair);
    for (double k : known_locations) h.add(k);
    h.add(known_file);
    for (const auto& in : inputs) {
        h.add(in.name);
        std::ifstream probe(in.path, std::ios::binary);
        h.add(probe ? read_file(in.path) : std::string("<missing>"));
    }
    h.add(static_cast<double>(synth.samples));
    h.add(static_cast<double>(synth.elements));
    for (const auto& a : synth.anomalies) {
        h.add(static_cast<double>(a.element));
        h.add(a.center);
        h.add(a.width);
        h.add(a.amplitude);
    }
    for (double b : synth.baseline) h.add(b);
    h.add(synth.noise);
    h.add(std::to_string(synth.seed));
    h.add(synth.extent);
    return h.hex();
}

MaterialInput parse_material_input(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) return {fs::path(spec).stem().string(), spec};
    if (eq == 0 || eq + 1 == spec.size()) throw Error("material input must look like name=path: '" + spec + "'");
    return {spec.substr(0, eq), spec.substr(eq + 1)};
}

std::vector<SmoothFit> fit_dataset(const TransectDataset& dataset, const FitSettings& settings, unsigned threads) {
    const Family family = settings.family();
    const std::vector<double> grid = settings.grid();
    std::vector<SmoothFit> fits(dataset.element_count());
    parallel_for(fits.size(), threads, [&](std::size_t e) {
        try {
            fits[e] = select_lambda_gcv(dataset.positions, dataset.values[e], dataset.weights[e], family, grid,
                                        settings.options());
            fits[e].element = dataset.elements[e];
        } catch (const std::exception& ex) {
            throw Error("element " + dataset.elements[e] + ": " + ex.what());
        }
    });
    return fits;
}

MaterialResult analyze_material(const std::string& name, const TransectDataset& dataset, const RunConfig& config) {
    MaterialResult r;
    r.name = name;
    r.dataset = dataset;
    r.fits = fit_dataset(dataset, config.fit, config.threads);
    const EvaluationGrid grid = config.grid();
    r.matrix = build_matrix(r.fits, grid, MatrixOptions{config.derivatives, config.threads}, name);
    r.scaled = scale_matrix(r.matrix);
    r.ranked = top_k(r.matrix, config.top_k);
    r.frequency = element_frequency(top_k(r.matrix, config.frequency_k), config.frequency_k);
    return r;
}

MaterialResult analyze_material(const MaterialInput& input, const RunConfig& config) {
    const RawSampleTable table = parse_table_file(input.path, config.format);
    return analyze_material(input.name, make_dataset(table), config);
}

CurvatureProfile pair_profile(const MaterialResult& result, const std::string& pair, const RunConfig& config) {
    const auto slash = pair.find('/');
    if (slash == std::string::npos) throw Error("pair must look like El1/El2: '" + pair + "'");
    const std::string a = pair.substr(0, slash), b = pair.substr(slash + 1);
    const std::size_t ia = result.dataset.element_index(a), ib = result.dataset.element_index(b);
    const EvaluationGrid grid = config.grid();
    return analyze_pair(sample_curve(result.fits[ia], grid, config.derivatives),
                        sample_curve(result.fits[ib], grid, config.derivatives), grid);
}

std::vector<KnownHit> overlap_report(const std::vector<Interval>& normalized_intervals,
                                     const std::vector<double>& known) {
    std::vector<KnownHit> out;
    for (double k : known) {
        KnownHit h{k, false, std::numeric_limits<double>::infinity()};
        for (const auto& iv : normalized_intervals) {
            if (iv.contains(k)) {
                h.hit = true;
                h.distance_to_interval = 0.0;
                break;
            }
            h.distance_to_interval = std::min(h.distance_to_interval, k < iv.start ? iv.start - k : k - iv.end);
        }
        out.push_back(h);
    }
    return out;
}

void write_fit_table(std::ostream& out, const std::vector<SmoothFit>& fits, const std::string& hash) {
    out << header("fits", hash) << "element,lambda,edf,deviance,gcv,dispersion,iterations,tweedie_power\n";
    for (const auto& f : fits)
        out << f.element << ',' << format_number(f.lambda) << ',' << format_number(f.edf) << ','
            << format_number(f.deviance) << ',' << format_number(f.gcv_score) << ',' << format_number(f.dispersion)
            << ',' << f.iterations << ',' << format_number(f.family.power) << '\n';
}

void write_diagnostics(std::ostream& out, const std::vector<DiagnosticRow>& rows, const std::string& hash) {
    out << header("diagnostics", hash) << "x,y,eta,mu,pearson_residual\n";
    for (const auto& r : rows)
        out << format_number(r.x) << ',' << format_number(r.y) << ',' << format_number(r.eta) << ','
            << format_number(r.mu) << ',' << format_number(r.pearson_residual) << '\n';
}

void write_matrix_csv(std::ostream& out, const CValueMatrix& matrix, const std::string& hash) {
    out << header(matrix.scaled ? "cvalues-scaled" : "cvalues", hash) << "element";
    for (const auto& e : matrix.elements) out << ',' << e;
    out << '\n';
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        out << matrix.elements[i];
        for (std::size_t j = 0; j < matrix.size(); ++j)
            out << ',' << (matrix.present(i, j) ? format_number(matrix(i, j)) : "");
        out << '\n';
    }
}

void write_matrix_json(std::ostream& out, const CValueMatrix& matrix, const std::string& hash) {
    ordered_json j;
    j["config"] = hash;
    j["material"] = matrix.material;
    j["scaled"] = matrix.scaled;
    j["elements"] = matrix.elements;
    j["values"] = ordered_json::array();
    j["coverage"] = ordered_json::array();
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        ordered_json row = ordered_json::array(), cov = ordered_json::array();
        for (std::size_t j2 = 0; j2 < matrix.size(); ++j2) {
            row.push_back(matrix.present(i, j2) ? ordered_json(matrix(i, j2)) : ordered_json(nullptr));
            cov.push_back(matrix.coverage(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j2)));
        }
        j["values"].push_back(row);
        j["coverage"].push_back(cov);
    }
    out << j.dump(2) << '\n';
}

void write_ranked_csv(std::ostream& out, const RankedList& ranked, const std::string& material,
                      const std::string& hash) {
    out << header("ranked", hash) << "material,rank,pair,first,second,c_value,scaled_c_value\n";
    for (const auto& r : ranked)
        out << material << ',' << r.rank << ',' << r.label() << ',' << r.first << ',' << r.second << ','
            << format_number(r.c_value) << ',' << format_number(r.scaled_c_value) << '\n';
}

void write_ranked_json(std::ostream& out, const RankedList& ranked, const std::string& material,
                       const std::string& hash) {
    for (const auto& r : ranked) {
        ordered_json j{{"config", hash},         {"material", material},  {"rank", r.rank},
                       {"pair", r.label()},      {"first", r.first},      {"second", r.second},
                       {"c_value", r.c_value}, {"scaled_c_value", r.scaled_c_value}};
        out << j.dump() << '\n';
    }
}

void write_frequency_csv(std::ostream& out, const std::vector<ElementCount>& counts, const std::string& material,
                         const std::string& hash) {
    out << header("frequency", hash) << "material,position,element,count,first_rank\n";
    for (std::size_t i = 0; i < counts.size(); ++i)
        out << material << ',' << i + 1 << ',' << counts[i].element << ',' << counts[i].count << ','
            << counts[i].first_rank << '\n';
}

void write_frequency_json(std::ostream& out, const std::vector<ElementCount>& counts, const std::string& material,
                          const std::string& hash) {
    for (std::size_t i = 0; i < counts.size(); ++i) {
        ordered_json j{{"config", hash},
                       {"material", material},
                       {"position", i + 1},
                       {"element", counts[i].element},
                       {"count", counts[i].count},
                       {"first_rank", counts[i].first_rank}};
        out << j.dump() << '\n';
    }
}

void write_top_curves_csv(std::ostream& out, const std::vector<TopCurve>& curves, const std::string& hash) {
    out << header("top-curves", hash) << "material,rank,c_value\n";
    for (const auto& c : curves)
        for (std::size_t i = 0; i < c.values.size(); ++i)
            out << c.material << ',' << i + 1 << ',' << format_number(c.values[i]) << '\n';
}

void write_curve_dump(std::ostream& out, const CurvatureProfile& profile, const std::string& hash) {
    const auto& c = profile.curve;
    out << header("curve " + c.numerator + "/" + c.denominator, hash) << "x,g,scaled_g,kappa,threshold,above\n";
    for (std::size_t i = 0; i < c.x.size(); ++i)
        out << format_number(c.x[i]) << ',' << format_number(c.g[i]) << ',' << format_number(c.scaled(i)) << ','
            << format_number(profile.kappa[i]) << ',' << format_number(profile.threshold) << ','
            << (profile.kappa[i] > profile.threshold ? 1 : 0) << '\n';
}

int cmd_synth(const RunConfig& config, std::ostream& log) {
    const SyntheticDataset data = generate(config.synth);
    write_with(config.out_dir / "synthetic.csv", log, [&](std::ostream& o) { write_table_csv(o, data.table); });
    write_with(config.out_dir / "synthetic_truth.json", log,
               [&](std::ostream& o) { write_truth_json(o, data.truth, config.synth); });
    return 0;
}

int cmd_fit(const RunConfig& config, std::ostream& log) {
    config.validate();
    const std::string hash = config.hash();
    for (const auto& in : selected_inputs(config)) {
        MaterialResult r;
        r.name = in.name;
        r.dataset = make_dataset(parse_table_file(in.path, config.format));
        r.fits = fit_dataset(r.dataset, config.fit, config.threads);
        write_fit_outputs(r, config.out_dir / sanitize(in.name), hash, log);
    }
    return 0;
}

int cmd_rank(const RunConfig& config, std::ostream& log) {
    config.validate();
    const std::string hash = config.hash();
    const auto results = analyze_all(selected_inputs(config), config);
    std::vector<CValueMatrix> unscaled;
    for (const auto& r : results) {
        write_rank_outputs(r, config.out_dir / sanitize(r.name), hash, log);
        unscaled.push_back(r.matrix);
        if (!r.ranked.empty())
            log << r.name << ": top pair " << r.ranked.front().label() << " c=" << format_number(r.ranked.front().c_value)
                << '\n';
    }
    write_with(config.out_dir / "top_curves.csv", log,
               [&](std::ostream& o) { write_top_curves_csv(o, top_curves(unscaled, config.curve_k), hash); });
    write_accumulated(results, config.out_dir, hash, false, log);
    return 0;
}

int cmd_heatmap(const RunConfig& config, std::ostream& log) {
    config.validate();
    const std::string hash = config.hash();
    const auto results = analyze_all(selected_inputs(config), config);
    for (const auto& r : results) write_text(config.out_dir / sanitize(r.name) / "heatmap.svg", heatmap_svg(r.scaled), log);
    write_accumulated(results, config.out_dir, hash, true, log);
    return 0;
}

int cmd_detect(const RunConfig& config, std::ostream& log) {
    config.validate();
    const std::string hash = config.hash();
    for (const auto& in : selected_inputs(config)) {
        const MaterialResult r = analyze_material(in, config);
        write_detect_outputs(r, config, config.out_dir / sanitize(r.name), hash, log);
    }
    return 0;
}

int cmd_report(const RunConfig& config, std::ostream& log) {
    config.validate();
    const std::string hash = config.hash();
    const auto results = analyze_all(selected_inputs(config), config);
    std::vector<CValueMatrix> unscaled;
    for (const auto& r : results) {
        const fs::path dir = config.out_dir / sanitize(r.name);
        write_fit_outputs(r, dir, hash, log);
        write_rank_outputs(r, dir, hash, log);
        write_text(dir / "heatmap.svg", heatmap_svg(r.scaled), log);
        write_detect_outputs(r, config, dir, hash, log);
        unscaled.push_back(r.matrix);
    }
    const auto curves = top_curves(unscaled, config.curve_k);
    write_with(config.out_dir / "top_curves.csv", log, [&](std::ostream& o) { write_top_curves_csv(o, curves, hash); });
    write_text(config.out_dir / "top_curves.svg", top_curves_svg(curves), log);
    write_accumulated(results, config.out_dir, hash, true, log);
    return 0;
}

}  // namespace lograt
