#include "lograt/ranking.hpp"

#include "lograt/error.hpp"
#include "lograt/parallel.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <utility>

namespace lograt {

namespace {

using Index = Eigen::Index;

Index idx(std::size_t i) { return static_cast<Index>(i); }

std::pair<std::string, std::string> sorted_pair(const std::string& a, const std::string& b) {
    return a < b ? std::pair{a, b} : std::pair{b, a};
}

}  // namespace

std::size_t CValueMatrix::index_of(const std::string& element) const {
    auto it = std::find(elements.begin(), elements.end(), element);
    if (it == elements.end()) throw Error("element '" + element + "' not in matrix");
    return static_cast<std::size_t>(it - elements.begin());
}

double CValueMatrix::max_value() const {
    double best = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
        for (std::size_t j = i + 1; j < size(); ++j)
            if (present(i, j)) best = std::max(best, (*this)(i, j));
    return best;
}

CValueMatrix build_matrix(std::span<const ElementCurve> curves, const EvaluationGrid& grid, unsigned threads,
                          std::string material) {
    const std::size_t m = curves.size();
    if (m < 2) throw Error("c-value matrix needs at least 2 elements");

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(pair_count(m));
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t s = r + 1; s < m; ++s) pairs.emplace_back(r, s);

    std::vector<double> cvals(pairs.size());
    parallel_for(pairs.size(), threads, [&](std::size_t p) {
        const auto [r, s] = pairs[p];
        try {
            cvals[p] = analyze_pair(curves[r], curves[s], grid).c_value;
        } catch (const std::exception& e) {
            throw Error("pair " + curves[r].element + "/" + curves[s].element + ": " + e.what());
        }
    });

    CValueMatrix out;
    out.material = std::move(material);
    for (const auto& c : curves) out.elements.push_back(c.element);
    out.values = Eigen::MatrixXd::Zero(idx(m), idx(m));
    out.coverage = Eigen::MatrixXi::Ones(idx(m), idx(m));
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto [r, s] = pairs[p];
        out.values(idx(r), idx(s)) = cvals[p];
        out.values(idx(s), idx(r)) = cvals[p];
    }
    return out;
}

CValueMatrix build_matrix(std::span<const SmoothFit> fits, const EvaluationGrid& grid, const MatrixOptions& options,
                          std::string material) {
    std::vector<ElementCurve> curves(fits.size());
    parallel_for(fits.size(), options.threads,
                 [&](std::size_t i) { curves[i] = sample_curve(fits[i], grid, options.derivatives); });
    return build_matrix(curves, grid, options.threads, std::move(material));
}

CValueMatrix scale_matrix(CValueMatrix matrix) {
    const double top = matrix.max_value();
    if (top > 0.0 && !matrix.scaled) matrix.values /= top;
    matrix.scaled = true;
    return matrix;
}

RankedList top_k(const CValueMatrix& matrix, std::size_t k) {
    if (k < 1) throw Error("top-k needs k >= 1");
    struct Entry {
        std::size_t i, j;
        double value;
        std::pair<std::string, std::string> key;
    };
    std::vector<Entry> entries;
    for (std::size_t i = 0; i < matrix.size(); ++i)
        for (std::size_t j = i + 1; j < matrix.size(); ++j)
            if (matrix.present(i, j))
                entries.push_back({i, j, matrix(i, j), sorted_pair(matrix.elements[i], matrix.elements[j])});
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.key < b.key;
    });

    const double top = entries.empty() ? 0.0 : entries.front().value;
    RankedList out;
    for (std::size_t r = 0; r < std::min(k, entries.size()); ++r) {
        const auto& e = entries[r];
        const double scaled = matrix.scaled ? e.value : (top > 0.0 ? e.value / top : 0.0);
        out.push_back({r + 1, matrix.elements[e.i], matrix.elements[e.j], e.value, scaled});
    }
    return out;
}

std::vector<ElementCount> element_frequency(const RankedList& ranked, std::size_t k) {
    if (ranked.empty()) throw Error("element frequency of an empty ranking");
    std::vector<ElementCount> counts;
    std::map<std::string, std::size_t> slot;
    for (std::size_t r = 0; r < std::min(k, ranked.size()); ++r) {
        for (const auto* el : {&ranked[r].first, &ranked[r].second}) {
            auto [it, fresh] = slot.try_emplace(*el, counts.size());
            if (fresh) counts.push_back({*el, 0, ranked[r].rank});
            ++counts[it->second].count;
        }
    }
    // Stable sort keeps first-appearance order (including position within a pair) for equal counts.
    std::stable_sort(counts.begin(), counts.end(), [](const ElementCount& a, const ElementCount& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.first_rank < b.first_rank;
    });
    return counts;
}

CValueMatrix accumulate(std::span<const CValueMatrix> matrices) {
    if (matrices.empty()) throw Error("nothing to accumulate");
    std::set<std::string> all;
    for (const auto& mat : matrices) {
        if (!mat.scaled) throw Error("accumulation expects scaled matrices (material '" + mat.material + "')");
        all.insert(mat.elements.begin(), mat.elements.end());
    }

    CValueMatrix out;
    out.material = "accumulated";
    out.scaled = true;
    out.elements.assign(all.begin(), all.end());
    const std::size_t m = out.elements.size();
    out.values = Eigen::MatrixXd::Zero(idx(m), idx(m));
    out.coverage = Eigen::MatrixXi::Zero(idx(m), idx(m));

    std::vector<std::map<std::string, std::size_t>> lookup;
    for (const auto& mat : matrices) {
        auto& map = lookup.emplace_back();
        for (std::size_t i = 0; i < mat.size(); ++i) map[mat.elements[i]] = i;
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
            std::vector<double> cell;
            for (std::size_t t = 0; t < matrices.size(); ++t) {
                auto a = lookup[t].find(out.elements[i]);
                auto b = lookup[t].find(out.elements[j]);
                if (a == lookup[t].end() || b == lookup[t].end()) continue;
                if (!matrices[t].present(a->second, b->second)) continue;
                cell.push_back(matrices[t](a->second, b->second));
            }
            // Sorting makes the sum independent of input order.
            std::sort(cell.begin(), cell.end());
            const double mean =
                cell.empty() ? 0.0 : std::accumulate(cell.begin(), cell.end(), 0.0) / static_cast<double>(cell.size());
            out.values(idx(i), idx(j)) = out.values(idx(j), idx(i)) = i == j ? 0.0 : mean;
            out.coverage(idx(i), idx(j)) = out.coverage(idx(j), idx(i)) = static_cast<int>(cell.size());
        }
    }
    return out;
}

std::vector<TopCurve> top_curves(std::span<const CValueMatrix> matrices, std::size_t k) {
    if (k < 1) throw Error("top curves need k >= 1");
    std::vector<TopCurve> out;
    for (const auto& mat : matrices) {
        TopCurve curve{mat.material, {}};
        for (std::size_t i = 0; i < mat.size(); ++i)
            for (std::size_t j = i + 1; j < mat.size(); ++j)
                if (mat.present(i, j)) curve.values.push_back(mat(i, j));
        std::sort(curve.values.begin(), curve.values.end(), std::greater<>());
        if (curve.values.size() > k) curve.values.resize(k);
        out.push_back(std::move(curve));
    }
    return out;
}

}  // namespace lograt
