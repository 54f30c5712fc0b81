// lograt: rank element log-ratios along a transect by the curvature of
// their smoothed fits and locate candidate mineralized intervals.

#include "lograt/error.hpp"
#include "lograt/report.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <sstream>

namespace {

lograt::Anomaly parse_anomaly(const std::string& text) {
    // element:center:width:amplitude, element given as 0-based index
    std::vector<double> parts;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ':')) parts.push_back(std::stod(tok));
    if (parts.size() != 4 || parts[0] < 0) throw lograt::Error("anomaly must be element:center:width:amplitude");
    return {static_cast<std::size_t>(parts[0]), parts[1], parts[2], parts[3]};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Curvature-based ranking of element log-ratios along a geochemical transect"};
    app.set_config("--config", "", "Configuration file (TOML/INI key = value)");
    app.require_subcommand(1);
    app.fallthrough();

    lograt::RunConfig config;
    std::vector<std::string> inputs;
    std::string derivatives = "finite-difference";
    std::string out_dir = config.out_dir.string();
    std::string delimiter = ",";
    std::vector<std::string> anomalies;
    std::size_t top_k = config.top_k;

    app.add_option("--input", inputs, "Input table per material as name=path (repeatable)");
    app.add_option("--material", config.material, "Only process this material");
    app.add_option("--pair", config.pair, "Pair for detect, El1/El2 (default: top-ranked)");
    app.add_option("--top-k", top_k, "Rows in ranked tables")->check(CLI::PositiveNumber);
    app.add_option("--frequency-k", config.frequency_k, "Ranked pairs counted in element frequencies")
        ->check(CLI::PositiveNumber);
    app.add_option("--curve-k", config.curve_k, "Values per material in top c-value curves")->check(CLI::PositiveNumber);
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--threads", config.threads, "Worker threads")->check(CLI::PositiveNumber);

    app.add_option("--delimiter", delimiter, "Field delimiter of input tables");
    app.add_option("--id-column", config.format.id_column, "Sample id column");
    app.add_option("--position-column", config.format.position_column, "1-D distance column (meters)");
    app.add_option("--east-column", config.format.east_column, "Easting column");
    app.add_option("--north-column", config.format.north_column, "Northing column");
    app.add_option("--ignore-columns", config.format.ignore_columns, "Columns that are not elements");

    app.add_option("--tweedie-power", config.fit.tweedie_power, "Tweedie variance power in (1,2)");
    app.add_option("--lambda-min", config.fit.lambda_min, "Smallest smoothing parameter on the GCV grid");
    app.add_option("--lambda-max", config.fit.lambda_max, "Largest smoothing parameter on the GCV grid");
    app.add_option("--lambda-count", config.fit.lambda_count, "Number of log-spaced GCV grid values");
    app.add_option("--gcv-gamma", config.fit.gcv_gamma, "edf inflation in the GCV score (1 = plain GCV)");
    app.add_option("--grid-points", config.grid_points, "Evaluation grid size N");
    app.add_option("--epsilon", config.epsilon, "Finite-difference step");
    app.add_option("--derivatives", derivatives, "finite-difference or analytic")
        ->check(CLI::IsMember({"finite-difference", "analytic"}));
    app.add_option("--known", config.known_locations, "Known anomaly positions on the normalized scale");
    app.add_option("--known-file", config.known_file, "File of known normalized anomaly positions");

    app.add_option("--seed", config.synth.seed, "Random seed for synth");
    app.add_option("--samples", config.synth.samples, "Synthetic sample count");
    app.add_option("--elements", config.synth.elements, "Synthetic element count");
    app.add_option("--anomaly", anomalies, "Synthetic anomaly element:center:width:amplitude (repeatable)");
    app.add_option("--noise", config.synth.noise, "Synthetic log-normal noise sd");
    app.add_option("--baseline", config.synth.baseline, "Synthetic baseline(s)");
    app.add_option("--extent", config.synth.extent, "Synthetic transect length in meters");

    const std::map<std::string, int (*)(const lograt::RunConfig&, std::ostream&)> commands{
        {"fit", lograt::cmd_fit},         {"rank", lograt::cmd_rank},   {"heatmap", lograt::cmd_heatmap},
        {"detect", lograt::cmd_detect},   {"synth", lograt::cmd_synth}, {"report", lograt::cmd_report}};
    const std::map<std::string, std::string> help{
        {"fit", "Fit one smooth per element and write fit summaries and residual diagnostics"},
        {"rank", "Write c-value matrices, ranked log-ratios and element frequencies"},
        {"heatmap", "Render scaled c-value heatmaps (per material and accumulated)"},
        {"detect", "Report exceedance intervals for one pair (default: top-ranked)"},
        {"synth", "Generate a synthetic transect with planted anomalies"},
        {"report", "Run fit, rank, heatmap and detect in one pass"}};
    for (const auto& [name, fn] : commands) app.add_subcommand(name, help.at(name));

    CLI11_PARSE(app, argc, argv);

    try {
        for (const auto& s : inputs) config.inputs.push_back(lograt::parse_material_input(s));
        for (const auto& a : anomalies) config.synth.anomalies.push_back(parse_anomaly(a));
        if (delimiter == "\\t" || delimiter == "tab") delimiter = "\t";
        if (delimiter.size() != 1) throw lograt::Error("delimiter must be a single character");
        config.format.delimiter = delimiter.front();
        config.derivatives = derivatives == "analytic" ? lograt::DerivativeMethod::Analytic
                                                       : lograt::DerivativeMethod::FiniteDifference;
        config.top_k = top_k;
        config.out_dir = out_dir;
        const std::string name = app.get_subcommands().front()->get_name();
        return commands.at(name)(config, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "lograt: " << e.what() << '\n';
        return 1;
    }
}
