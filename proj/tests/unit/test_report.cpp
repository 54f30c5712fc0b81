#include "lograt/error.hpp"
#include "lograt/report.hpp"

#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace lograt;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("lograt-test-" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig synthetic_config(const fs::path& dir, std::uint64_t seed = 42) {
    RunConfig c;
    c.out_dir = dir;
    c.synth.samples = 30;
    c.synth.elements = 6;
    c.synth.noise = 0.1;
    c.synth.seed = seed;
    c.synth.anomalies = {{0, 0.45, 0.03, 2.0}};
    return c;
}

std::size_t count(const std::string& s, const std::string& what) {
    std::size_t n = 0;
    for (auto p = s.find(what); p != std::string::npos; p = s.find(what, p + 1)) ++n;
    return n;
}

}  // namespace

TEST_CASE("material input specs") {
    const auto a = parse_material_input("ore=data/a.csv");
    CHECK(a.name == "ore");
    CHECK(a.path == "data/a.csv");
    CHECK(parse_material_input("dir/till.csv").name == "till");
    CHECK_THROWS_AS(parse_material_input("=x.csv"), Error);
}

TEST_CASE("config hash is stable and sensitive to settings") {
    RunConfig a, b;
    CHECK(a.hash() == b.hash());
    CHECK(a.hash().size() == 16);
    b.fit.tweedie_power = 1.6;
    CHECK(a.hash() != b.hash());
    b = a;
    b.grid_points = 6000;
    CHECK(a.hash() != b.hash());
    b = a;
    b.out_dir = "elsewhere";
    CHECK(a.hash() == b.hash());
}

TEST_CASE("config validation") {
    RunConfig c;
    CHECK_NOTHROW(c.validate());
    c.fit.tweedie_power = 2.5;
    CHECK_THROWS_AS(c.validate(), Error);
    c = RunConfig{};
    c.grid_points = 10;
    CHECK_THROWS_AS(c.validate(), Error);
    c = RunConfig{};
    c.known_locations = {1.5};
    CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("overlap report") {
    const std::vector<Interval> ivs{{0.40, 0.46, 0.43, 1.0}, {0.7, 0.8, 0.75, 0.5}};
    const auto hits = overlap_report(ivs, {0.3, 0.43, 0.55});
    REQUIRE(hits.size() == 3);
    CHECK_FALSE(hits[0].hit);
    CHECK(hits[0].distance_to_interval == doctest::Approx(0.1));
    CHECK(hits[1].hit);
    CHECK(hits[2].distance_to_interval == doctest::Approx(0.09));
}

TEST_CASE("heatmap rendering") {
    CValueMatrix m;
    m.material = "demo";
    m.elements = {"A", "B", "C", "D", "E"};
    m.values = Eigen::MatrixXd::Zero(5, 5);
    m.coverage = Eigen::MatrixXi::Ones(5, 5);
    m.values(0, 3) = m.values(3, 0) = 4.0;
    m.values(1, 2) = m.values(2, 1) = 1.0;
    const std::string svg = heatmap_svg(m);
    CHECK(count(svg, "text-anchor=\"end\">") >= 5);
    CHECK(count(svg, "<rect") == 25 + 20);
    CHECK(svg.find("rgb(8,48,107)") != std::string::npos);
    CHECK(heat_color(0.0) == std::array<int, 3>{255, 255, 255});
    CHECK(heat_color(1.0) == std::array<int, 3>{8, 48, 107});

    m.values.setZero();
    const std::string blank = heatmap_svg(m);
    CHECK(blank.find("rgb(8,48,107)\" stroke") == std::string::npos);
    CHECK(count(blank, "fill=\"rgb(255,255,255)\" stroke") == 25);

    m.coverage(0, 1) = m.coverage(1, 0) = 0;
    CHECK(count(heatmap_svg(m), "class=\"absent\"") == 2);
}

TEST_CASE("tables carry the config header and absent cells are null") {
    CValueMatrix m;
    m.material = "acc";
    m.elements = {"A", "B"};
    m.values = Eigen::MatrixXd::Zero(2, 2);
    m.coverage = Eigen::MatrixXi::Zero(2, 2);
    std::ostringstream csv, js;
    write_matrix_csv(csv, m, "0123456789abcdef");
    CHECK(csv.str().rfind("# lograt cvalues config=0123456789abcdef\n", 0) == 0);
    write_matrix_json(js, m, "h");
    const auto j = nlohmann::json::parse(js.str());
    CHECK(j["values"][0][1].is_null());
    CHECK(j["coverage"][0][1] == 0);
}

TEST_CASE("synthetic end-to-end through the commands") {
    TempDir tmp;
    std::ostringstream log;
    RunConfig c = synthetic_config(tmp.path);
    REQUIRE(cmd_synth(c, log) == 0);
    const auto csv = tmp.path / "synthetic.csv";
    REQUIRE(fs::exists(csv));
    REQUIRE(fs::exists(tmp.path / "synthetic_truth.json"));

    c.inputs = {{"syn", csv.string()}, {"syn2", csv.string()}};
    c.out_dir = tmp.path / "out";
    c.known_locations = {0.3, 0.38, 0.43, 0.48, 0.51, 0.53, 0.55};
    REQUIRE(cmd_report(c, log) == 0);

    const auto dir = c.out_dir / "syn";
    for (const char* f : {"fits.csv", "cvalues.csv", "cvalues.json", "cvalues_scaled.csv", "ranked.csv", "ranked.jsonl",
                          "frequency.csv", "frequency.jsonl", "heatmap.svg", "diagnostics/Co.csv"})
        CHECK_MESSAGE(fs::exists(dir / f), f);
    CHECK(fs::exists(c.out_dir / "accumulated" / "cvalues_scaled.csv"));
    CHECK(fs::exists(c.out_dir / "accumulated" / "heatmap.svg"));
    CHECK(fs::exists(c.out_dir / "top_curves.csv"));
    CHECK(fs::exists(c.out_dir / "top_curves.svg"));

    const std::string ranked = slurp(dir / "ranked.csv");
    CHECK(ranked.rfind("# lograt ranked config=" + c.hash(), 0) == 0);

    std::ifstream freq(dir / "frequency.jsonl");
    std::string first;
    std::getline(freq, first);
    CHECK(nlohmann::json::parse(first)["element"] == "Co");

    fs::path intervals;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().filename().string().rfind("intervals_", 0) == 0 && e.path().extension() == ".json")
            intervals = e.path();
    REQUIRE(!intervals.empty());
    const auto j = nlohmann::json::parse(slurp(intervals));
    CHECK(j["known_locations"].size() == 7);
    CHECK(j["hits"].get<int>() + j["misses"].get<int>() == 7);
}

TEST_CASE("detect on a named pair and on a flat transect") {
    TempDir tmp;
    std::ostringstream log;
    RunConfig c = synthetic_config(tmp.path);
    c.synth.noise = 0.0;
    c.synth.anomalies.clear();
    REQUIRE(cmd_synth(c, log) == 0);
    c.inputs = {{"flat", (tmp.path / "synthetic.csv").string()}};
    c.pair = "Al/Fe";
    REQUIRE(cmd_detect(c, log) == 0);
    const auto j = nlohmann::json::parse(slurp(tmp.path / "flat" / "intervals_Al-Fe.json"));
    CHECK(j["intervals"].empty());
    CHECK(j["c_value"] == 0.0);

    c.pair = "Al/Zn";
    CHECK_THROWS_AS(cmd_detect(c, log), Error);
}

TEST_CASE("malformed input fails with the offending line") {
    TempDir tmp;
    const auto bad = tmp.path / "bad.csv";
    std::ofstream(bad) << "id,x,Co,Al\ns1,0,1,2\ns2,1,1\ns3,2,1,2\ns4,3,1,2\n";
    RunConfig c;
    c.out_dir = tmp.path / "out";
    c.inputs = {{"bad", bad.string()}};
    std::ostringstream log;
    try {
        cmd_rank(c, log);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("bad.csv") != std::string::npos);
    }
}
