#include "lograt/ingest.hpp"

#include "lograt/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace lograt {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    std::string out(s.substr(first, last - first + 1));
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
    return out;
}

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (char ch : line) {
        if (ch == '"') quoted = !quoted;
        if (ch == delim && !quoted) {
            cells.push_back(trim(cell));
            cell.clear();
        } else {
            cell.push_back(ch);
        }
    }
    cells.push_back(trim(cell));
    return cells;
}

bool parse_double(const std::string& text, double& out) {
    if (text.empty()) return false;
    const char* begin = text.data();
    const char* end = begin + text.size();
    if (*begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

std::size_t TransectDataset::element_index(const std::string& symbol) const {
    auto it = std::find(elements.begin(), elements.end(), symbol);
    if (it == elements.end()) throw Error("unknown element '" + symbol + "'");
    return static_cast<std::size_t>(it - elements.begin());
}

RawSampleTable parse_table(std::istream& in, const TableFormat& format) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line = line.substr(3);  // BOM
        if (trim(line).empty() || trim(line).front() == '#') continue;
        header = split(line, format.delimiter);
        break;
    }
    if (header.empty()) throw ParseError("empty input, expected a header row", 0);

    auto find_col = [&](const std::string& name) -> std::ptrdiff_t {
        if (name.empty()) return -1;
        auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : it - header.begin();
    };
    const std::size_t header_line = line_no;
    const auto id_col = find_col(format.id_column);
    const auto pos_col = find_col(format.position_column);
    const auto east_col = find_col(format.east_column);
    const auto north_col = find_col(format.north_column);

    RawSampleTable table;
    if (pos_col >= 0) {
        table.coordinate_kind = CoordinateKind::Distance;
    } else if (east_col >= 0 && north_col >= 0) {
        table.coordinate_kind = CoordinateKind::EastNorth;
    } else {
        throw ParseError("missing position column '" + format.position_column + "' (or '" + format.east_column +
                             "' and '" + format.north_column + "')",
                         header_line);
    }

    std::vector<std::size_t> element_cols;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const auto ci = static_cast<std::ptrdiff_t>(c);
        if (ci == id_col || ci == pos_col) continue;
        if (table.coordinate_kind == CoordinateKind::EastNorth && (ci == east_col || ci == north_col)) continue;
        if (std::find(format.ignore_columns.begin(), format.ignore_columns.end(), header[c]) !=
            format.ignore_columns.end())
            continue;
        if (header[c].empty()) throw ParseError("empty column name at position " + std::to_string(c + 1), header_line);
        if (std::find(table.elements.begin(), table.elements.end(), header[c]) != table.elements.end())
            throw ParseError("duplicate column '" + header[c] + "'", header_line);
        element_cols.push_back(c);
        table.elements.push_back(header[c]);
    }
    if (element_cols.size() < 2)
        throw ParseError("at least 2 element columns required, found " + std::to_string(element_cols.size()),
                         header_line);
    table.concentrations.resize(element_cols.size());

    auto number = [&](const std::vector<std::string>& cells, std::size_t col, const std::string& row_id) {
        double v = 0.0;
        if (!parse_double(cells[col], v)) {
            const std::string what = cells[col].empty() ? "missing value" : "unparseable number '" + cells[col] + "'";
            throw ParseError(what + " in row " + row_id + ", column " + header[col], line_no);
        }
        return v;
    };

    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        const auto cells = split(line, format.delimiter);
        if (cells.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(cells.size()),
                             line_no);
        const std::string row_id =
            id_col >= 0 ? cells[static_cast<std::size_t>(id_col)] : "row" + std::to_string(table.size() + 1);
        table.sample_ids.push_back(row_id);

        if (table.coordinate_kind == CoordinateKind::Distance) {
            table.distances.push_back(number(cells, static_cast<std::size_t>(pos_col), row_id));
        } else {
            table.coordinates.push_back({number(cells, static_cast<std::size_t>(east_col), row_id),
                                         number(cells, static_cast<std::size_t>(north_col), row_id)});
        }
        for (std::size_t e = 0; e < element_cols.size(); ++e) {
            const double v = number(cells, element_cols[e], row_id);
            if (v < 0.0)
                throw ParseError("negative concentration in row " + row_id + ", column " + header[element_cols[e]],
                                 line_no);
            table.concentrations[e].push_back(v);
        }
    }

    if (table.size() < format.min_samples)
        throw ParseError("at least " + std::to_string(format.min_samples) + " samples required, found " +
                             std::to_string(table.size()),
                         0);
    return table;
}

RawSampleTable parse_table_file(const std::string& path, const TableFormat& format) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    try {
        return parse_table(in, format);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what(), e.line());
    }
}

std::vector<double> project_to_transect(std::span<const Point2> coords) {
    const auto n = coords.size();
    if (n < 2) throw Error("projection needs at least 2 points");

    double cx = 0.0, cy = 0.0;
    for (const auto& p : coords) {
        cx += p[0];
        cy += p[1];
    }
    cx /= static_cast<double>(n);
    cy /= static_cast<double>(n);

    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (const auto& p : coords) {
        const Eigen::Vector2d d(p[0] - cx, p[1] - cy);
        cov += d * d.transpose();
    }
    cov /= static_cast<double>(n);
    if (cov.trace() <= 0.0) throw Error("projection needs at least 2 distinct points");

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
    Eigen::Vector2d axis = eig.eigenvectors().col(1);  // eigenvalues ascending

    std::vector<double> offsets(n);
    for (std::size_t i = 0; i < n; ++i) offsets[i] = (coords[i][0] - cx) * axis[0] + (coords[i][1] - cy) * axis[1];
    const bool flip = offsets.back() < offsets.front() ||
                      (offsets.back() == offsets.front() && (axis[0] < 0.0 || (axis[0] == 0.0 && axis[1] < 0.0)));
    if (flip)
        for (auto& o : offsets) o = -o;
    const double lo = *std::min_element(offsets.begin(), offsets.end());
    for (auto& o : offsets) o -= lo;
    return offsets;
}

std::vector<double> normalize_positions(std::span<const double> distances) {
    if (distances.empty()) throw Error("no positions to normalize");
    const auto [lo_it, hi_it] = std::minmax_element(distances.begin(), distances.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo)) throw Error("positions have zero range");

    std::vector<double> out(distances.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (distances[i] - lo) / (hi - lo);

    constexpr double jitter = 1e-6;
    std::map<double, std::size_t> seen;
    for (auto& x : out) {
        const std::size_t rank = seen[x]++;
        if (rank == 0) continue;
        const double step = jitter * static_cast<double>(rank);
        x = x >= 1.0 ? x - step : x + step;
    }

    std::vector<double> sorted = out;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw Error("duplicate positions could not be separated");
    return out;
}

std::vector<double> compute_outlier_weights(std::span<const double> y) {
    const auto n = y.size();
    if (n < 2) throw Error("outlier weights need at least 2 observations");
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : y) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));

    std::vector<double> w(n, 1.0);
    if (!(sd > 0.0)) return w;
    for (std::size_t i = 0; i < n; ++i) w[i] = std::max(std::abs(y[i] - mean) / sd, 1.0);
    const double wbar = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(n);
    for (auto& v : w) v /= wbar;
    return w;
}

TransectDataset make_dataset(const RawSampleTable& table) {
    const auto n = table.size();
    if (n < 4) throw Error("at least 4 samples required, found " + std::to_string(n));
    if (table.elements.size() < 2) throw Error("at least 2 elements required");

    std::vector<double> distances = table.coordinate_kind == CoordinateKind::Distance
                                        ? table.distances
                                        : project_to_transect(table.coordinates);
    const std::vector<double> positions = normalize_positions(distances);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return positions[a] < positions[b]; });

    TransectDataset ds;
    ds.elements = table.elements;
    ds.distance_min = *std::min_element(distances.begin(), distances.end());
    ds.distance_max = *std::max_element(distances.begin(), distances.end());
    for (auto i : order) {
        ds.sample_ids.push_back(table.sample_ids[i]);
        ds.positions.push_back(positions[i]);
    }
    for (const auto& column : table.concentrations) {
        if (column.size() != n) throw Error("ragged concentration table");
        std::vector<double> v;
        v.reserve(n);
        for (auto i : order) v.push_back(column[i]);
        ds.weights.push_back(compute_outlier_weights(v));
        ds.values.push_back(std::move(v));
    }
    return ds;
}

}  // namespace lograt
