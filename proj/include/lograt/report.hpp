#pragma once

// End-to-end pipeline and the file outputs behind the `lograt` commands.

#include "lograt/curvature.hpp"
#include "lograt/gam.hpp"
#include "lograt/ingest.hpp"
#include "lograt/ranking.hpp"
#include "lograt/synth.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace lograt {

struct FitSettings {
    double tweedie_power = 1.5;
    double lambda_min = 1e-6;
    double lambda_max = 1e4;
    int lambda_count = 40;
    /// edf inflation in the GCV score; 1 is plain GCV.
    double gcv_gamma = 1.4;
    PirlsOptions pirls;

    PirlsOptions options() const {
        PirlsOptions o = pirls;
        o.gcv_gamma = gcv_gamma;
        return o;
    }

    Family family() const { return Family::tweedie(tweedie_power); }
    std::vector<double> grid() const { return lambda_grid(lambda_min, lambda_max, lambda_count); }
};

struct MaterialInput {
    std::string name;
    std::string path;
};

struct RunConfig {
    std::vector<MaterialInput> inputs;
    TableFormat format;
    FitSettings fit;
    std::size_t grid_points = EvaluationGrid::default_size;
    double epsilon = EvaluationGrid::default_epsilon;
    DerivativeMethod derivatives = DerivativeMethod::FiniteDifference;
    std::size_t top_k = 10;
    std::size_t frequency_k = 10;
    std::size_t curve_k = 70;
    unsigned threads = 1;
    std::filesystem::path out_dir = "lograt-out";

    /// Restrict commands to one material (empty = all).
    std::string material;
    /// "El1/El2" for detect; empty selects the top-ranked pair.
    std::string pair;
    /// Known anomaly locations on the normalized [0,1] scale.
    std::vector<double> known_locations;
    std::string known_file;

    SyntheticSpec synth;

    void validate() const;
    EvaluationGrid grid() const { return EvaluationGrid::uniform(grid_points, epsilon); }
    /// FNV-1a over the analysis settings and input file contents, as 16 hex digits.
    std::string hash() const;
};

/// "name=path" or a bare path (material named after the file stem).
MaterialInput parse_material_input(const std::string& spec);

/// One smooth per element, lambda chosen by GCV; elements run in parallel.
std::vector<SmoothFit> fit_dataset(const TransectDataset& dataset, const FitSettings& settings,
                                   unsigned threads = 1);

struct MaterialResult {
    std::string name;
    TransectDataset dataset;
    std::vector<SmoothFit> fits;
    CValueMatrix matrix;
    CValueMatrix scaled;
    RankedList ranked;
    std::vector<ElementCount> frequency;
};

MaterialResult analyze_material(const std::string& name, const TransectDataset& dataset, const RunConfig& config);
MaterialResult analyze_material(const MaterialInput& input, const RunConfig& config);

/// Profile of one pair; "El1/El2" must name two fitted elements.
CurvatureProfile pair_profile(const MaterialResult& result, const std::string& pair, const RunConfig& config);

struct KnownHit {
    double location = 0.0;
    bool hit = false;
    double distance_to_interval = 0.0;  // 0 when hit
};

std::vector<KnownHit> overlap_report(const std::vector<Interval>& normalized_intervals,
                                     const std::vector<double>& known_locations);

// Writers. Every delimited table starts with a "# lograt <kind> config=<hash>" line.
void write_fit_table(std::ostream& out, const std::vector<SmoothFit>& fits, const std::string& hash);
void write_diagnostics(std::ostream& out, const std::vector<DiagnosticRow>& rows, const std::string& hash);
void write_matrix_csv(std::ostream& out, const CValueMatrix& matrix, const std::string& hash);
void write_matrix_json(std::ostream& out, const CValueMatrix& matrix, const std::string& hash);
void write_ranked_csv(std::ostream& out, const RankedList& ranked, const std::string& material,
                      const std::string& hash);
void write_ranked_json(std::ostream& out, const RankedList& ranked, const std::string& material,
                       const std::string& hash);
void write_frequency_csv(std::ostream& out, const std::vector<ElementCount>& counts, const std::string& material,
                         const std::string& hash);
void write_frequency_json(std::ostream& out, const std::vector<ElementCount>& counts, const std::string& material,
                          const std::string& hash);
void write_top_curves_csv(std::ostream& out, const std::vector<TopCurve>& curves, const std::string& hash);
void write_curve_dump(std::ostream& out, const CurvatureProfile& profile, const std::string& hash);

// SVG renderings.
std::string heatmap_svg(const CValueMatrix& matrix);
std::string profile_svg(const CurvatureProfile& profile, const std::vector<double>& known_locations = {});
std::string top_curves_svg(const std::vector<TopCurve>& curves);
/// RGB of the white-to-dark-blue ramp at t in [0,1].
std::array<int, 3> heat_color(double t);

// Commands. Each returns a process exit code and logs written files to `log`.
int cmd_fit(const RunConfig& config, std::ostream& log);
int cmd_rank(const RunConfig& config, std::ostream& log);
int cmd_heatmap(const RunConfig& config, std::ostream& log);
int cmd_detect(const RunConfig& config, std::ostream& log);
int cmd_synth(const RunConfig& config, std::ostream& log);
int cmd_report(const RunConfig& config, std::ostream& log);

}  // namespace lograt
