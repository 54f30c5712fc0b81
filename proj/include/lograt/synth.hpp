#pragma once

// Synthetic transects with planted anomalies of the form
// a / (1 + ((x - x0) / width)^2) on top of a constant baseline.

#include "lograt/ingest.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace lograt {

struct Anomaly {
    std::size_t element = 0;
    double center = 0.5;
    double width = 0.05;
    double amplitude = 1.0;
};

struct SyntheticSpec {
    std::size_t samples = 30;
    std::size_t elements = 6;
    std::vector<Anomaly> anomalies;
    /// Per-element baselines; a single value applies to every element.
    std::vector<double> baseline{1.0};
    /// Standard deviation of the multiplicative log-normal noise.
    double noise = 0.0;
    std::uint64_t seed = 1;
    /// Transect length in meters written to the `x` column.
    double extent = 1000.0;

    void validate() const;
    double baseline_of(std::size_t element) const;
};

struct GroundTruth {
    struct Entry {
        std::string element;
        double center;  // normalized position
        double center_distance;
        double width;
        double amplitude;
    };
    std::vector<Entry> anomalies;
    std::vector<std::string> anomalous_elements() const;
};

struct SyntheticDataset {
    RawSampleTable table;
    TransectDataset dataset;
    GroundTruth truth;
};

/// Element symbols used for synthetic columns ("Co", "Al", ...; "E<k>" past the list).
std::string synthetic_symbol(std::size_t index);

/// Noiseless signal multiplier 1 + sum of the element's peaks at normalized position x.
double anomaly_profile(const SyntheticSpec& spec, std::size_t element, double x);

SyntheticDataset generate(const SyntheticSpec& spec);

void write_table_csv(std::ostream& out, const RawSampleTable& table);
void write_truth_json(std::ostream& out, const GroundTruth& truth, const SyntheticSpec& spec);

}  // namespace lograt
