#pragma once

// Sample-table ingestion: CSV parsing, reduction of site coordinates to a
// 1-D transect position, position normalization and outlier weights.

#include <array>
#include <cstddef>
#include <istream>
#include <span>
#include <string>
#include <vector>

namespace lograt {

using Point2 = std::array<double, 2>;

enum class CoordinateKind { Distance, EastNorth };

/// Column roles and dialect for `parse_table`.
struct TableFormat {
    char delimiter = ',';
    std::string id_column = "id";
    std::string position_column = "x";
    std::string east_column = "east";
    std::string north_column = "north";
    /// Columns that are neither coordinates nor elements.
    std::vector<std::string> ignore_columns;
    std::size_t min_samples = 4;
};

/// One row per sample; concentrations stored column-major (one vector per element).
struct RawSampleTable {
    std::vector<std::string> sample_ids;
    CoordinateKind coordinate_kind = CoordinateKind::Distance;
    std::vector<double> distances;   // CoordinateKind::Distance
    std::vector<Point2> coordinates; // CoordinateKind::EastNorth
    std::vector<std::string> elements;
    std::vector<std::vector<double>> concentrations;

    std::size_t size() const noexcept { return sample_ids.size(); }
};

/// Positions sorted ascending and normalized to [0,1]; weights have mean 1 per element.
struct TransectDataset {
    std::vector<std::string> sample_ids;
    std::vector<double> positions;
    std::vector<std::string> elements;
    std::vector<std::vector<double>> values;
    std::vector<std::vector<double>> weights;
    /// Original distance range (transect units) that maps onto [0,1].
    double distance_min = 0.0;
    double distance_max = 1.0;

    std::size_t size() const noexcept { return positions.size(); }
    std::size_t element_count() const noexcept { return elements.size(); }
    std::size_t element_index(const std::string& symbol) const;

    double to_distance(double position) const noexcept {
        return distance_min + position * (distance_max - distance_min);
    }
};

RawSampleTable parse_table(std::istream& in, const TableFormat& format = {});
RawSampleTable parse_table_file(const std::string& path, const TableFormat& format = {});

/// Orthogonal projection onto the first principal axis of the point cloud.
/// Offsets are shifted so the minimum is 0. The axis is oriented so the last
/// point projects no lower than the first.
std::vector<double> project_to_transect(std::span<const Point2> coords);

/// Affine map onto [0,1]. Samples sharing a position are separated by
/// 1e-6 times their rank among the duplicates, moving inward at the upper end.
std::vector<double> normalize_positions(std::span<const double> distances);

/// max(|y - mean| / sd, 1) rescaled to mean 1. Constant input yields all ones.
std::vector<double> compute_outlier_weights(std::span<const double> y);

/// Distances (projected if needed), normalized positions sorted ascending, weights.
TransectDataset make_dataset(const RawSampleTable& table);

}  // namespace lograt
