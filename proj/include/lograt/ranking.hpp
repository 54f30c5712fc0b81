#pragma once

// c-value matrices over all element pairs and the tables derived from them.

#include "lograt/curvature.hpp"
#include "lograt/gam.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace lograt {

struct CValueMatrix {
    std::string material;
    std::vector<std::string> elements;
    Eigen::MatrixXd values;
    /// Materials contributing to each cell; 0 marks an absent cell after accumulation.
    Eigen::MatrixXi coverage;
    bool scaled = false;

    std::size_t size() const noexcept { return elements.size(); }
    bool present(std::size_t i, std::size_t j) const {
        return coverage(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > 0;
    }
    double operator()(std::size_t i, std::size_t j) const {
        return values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    std::size_t index_of(const std::string& element) const;
    double max_value() const;
};

constexpr std::size_t pair_count(std::size_t m) noexcept { return m < 2 ? 0 : m * (m - 1) / 2; }

struct RankedPair {
    std::size_t rank = 0;
    std::string first;
    std::string second;
    double c_value = 0.0;
    double scaled_c_value = 0.0;

    std::string label() const { return first + "/" + second; }
};

using RankedList = std::vector<RankedPair>;

struct ElementCount {
    std::string element;
    std::size_t count = 0;
    std::size_t first_rank = 0;
};

struct TopCurve {
    std::string material;
    std::vector<double> values;
};

struct MatrixOptions {
    DerivativeMethod derivatives = DerivativeMethod::FiniteDifference;
    unsigned threads = 1;
};

/// c-values of every unordered pair of the given fits.
CValueMatrix build_matrix(std::span<const SmoothFit> fits, const EvaluationGrid& grid,
                          const MatrixOptions& options = {}, std::string material = {});
CValueMatrix build_matrix(std::span<const ElementCurve> curves, const EvaluationGrid& grid, unsigned threads = 1,
                          std::string material = {});

/// Divides by the largest entry; an all-zero matrix is only flagged.
CValueMatrix scale_matrix(CValueMatrix matrix);

/// The k largest unordered pairs. Equal values are ordered by the
/// lexicographically sorted symbol pair.
RankedList top_k(const CValueMatrix& matrix, std::size_t k);

/// Element occurrences among the first k rows; by count, then by first appearance.
std::vector<ElementCount> element_frequency(const RankedList& ranked, std::size_t k);

/// Cellwise mean of scaled matrices over the materials holding both elements.
/// Elements of the result are the sorted union of all inputs.
CValueMatrix accumulate(std::span<const CValueMatrix> matrices);

/// Each material's upper-triangle c-values, descending, truncated to k.
std::vector<TopCurve> top_curves(std::span<const CValueMatrix> matrices, std::size_t k);

}  // namespace lograt
