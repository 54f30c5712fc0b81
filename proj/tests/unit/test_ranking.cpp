#include "lograt/error.hpp"
#include "lograt/ranking.hpp"
#include "lograt/synth.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace lograt;

namespace {

CValueMatrix make_matrix(std::vector<std::string> elements, std::vector<std::vector<double>> upper,
                         std::string material = "m") {
    const auto m = static_cast<Eigen::Index>(elements.size());
    CValueMatrix out;
    out.material = std::move(material);
    out.elements = std::move(elements);
    out.values = Eigen::MatrixXd::Zero(m, m);
    out.coverage = Eigen::MatrixXi::Ones(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = i + 1; j < m; ++j)
            out.values(i, j) = out.values(j, i) = upper[static_cast<std::size_t>(i)][static_cast<std::size_t>(j - i - 1)];
    return out;
}

std::vector<ElementCurve> random_curves(std::mt19937_64& rng, const EvaluationGrid& grid, std::size_t m) {
    std::vector<ElementCurve> out;
    for (std::size_t e = 0; e < m; ++e)
        out.push_back(numeric_derivatives(oracle::RandomCurve::draw(rng), grid, synthetic_symbol(e)));
    return out;
}

}  // namespace

TEST_CASE("27 elements give 351 pairs") {
    CHECK(pair_count(27) == 351);
    CHECK(pair_count(2) == 1);
    CHECK(pair_count(1) == 0);

    std::mt19937_64 rng(1);
    const auto grid = EvaluationGrid::uniform(200);
    const auto curves = random_curves(rng, grid, 27);
    const auto mat = build_matrix(curves, grid, 4);
    CHECK(mat.size() == 27);
    CHECK(top_k(mat, 1000).size() == 351);
}

TEST_CASE("matrix is symmetric with zero diagonal and order invariant") {
    std::mt19937_64 rng(2);
    const auto grid = EvaluationGrid::uniform(300);
    auto curves = random_curves(rng, grid, 6);
    const auto mat = build_matrix(curves, grid);
    CHECK((mat.values - mat.values.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(mat.values.diagonal().cwiseAbs().maxCoeff() == 0.0);

    std::vector<ElementCurve> shuffled = curves;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto other = build_matrix(shuffled, grid, 3);
    for (const auto& a : mat.elements)
        for (const auto& b : mat.elements)
            CHECK(other(other.index_of(a), other.index_of(b)) == mat(mat.index_of(a), mat.index_of(b)));

    std::vector<ElementCurve> dup{curves[0], curves[0]};
    dup[1].element = "Copy";
    CHECK(build_matrix(dup, grid).max_value() == 0.0);
}

TEST_CASE("scaling") {
    const auto mat = make_matrix({"A", "B", "C"}, {{2.0, 8.0}, {4.0}});
    const auto s = scale_matrix(mat);
    CHECK(s.scaled);
    CHECK(s.max_value() == 1.0);
    CHECK(s(0, 1) == 0.25);
    CHECK(top_k(s, 1)[0].label() == "A/C");
    CHECK(top_k(s, 1)[0].c_value == 1.0);
    CHECK(scale_matrix(s).values == s.values);

    const auto zero = scale_matrix(make_matrix({"A", "B"}, {{0.0}}));
    CHECK(zero.scaled);
    CHECK(zero.max_value() == 0.0);

    const auto ranked = top_k(mat, 3), ranked_s = top_k(s, 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(ranked[i].label() == ranked_s[i].label());
        CHECK(ranked[i].scaled_c_value == ranked_s[i].c_value);
    }
}

TEST_CASE("top-k ordering and ties") {
    const auto mat = make_matrix({"Zn", "Cu", "Ag", "Au"}, {{1.0, 1.0, 0.5}, {1.0, 0.2}, {0.1}});
    const auto r = top_k(mat, 10);
    REQUIRE(r.size() == 6);
    // Ties at 1.0 ordered by the sorted pair: (Ag,Cu) < (Ag,Zn) < (Cu,Zn).
    CHECK(r[0].label() == "Cu/Ag");
    CHECK(r[1].label() == "Zn/Ag");
    CHECK(r[2].label() == "Zn/Cu");
    CHECK(r[3].c_value == 0.5);
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(r[i].rank == i + 1);
    CHECK_THROWS_AS(top_k(mat, 0), Error);
}

TEST_CASE("element frequency") {
    RankedList r{{1, "Co", "Al", 2, 1}, {2, "Co", "Fe", 1, 0.5}, {3, "Fe", "Ni", 0.5, 0.25}};
    const auto two = element_frequency(r, 2);
    REQUIRE(two.size() == 3);
    CHECK(two[0].element == "Co");
    CHECK(two[0].count == 2);
    CHECK(two[1].element == "Al");
    CHECK(two[2].element == "Fe");
    CHECK(two[2].count == 1);

    const auto one = element_frequency(r, 1);
    REQUIRE(one.size() == 2);
    CHECK(one[0].count == 1);
    CHECK(one[1].count == 1);

    const auto all = element_frequency(r, 3);
    CHECK(all[0].element == "Co");
    CHECK(all[1].element == "Fe");
    CHECK(all[1].count == 2);
}

TEST_CASE("accumulation") {
    const auto a = scale_matrix(make_matrix({"A", "B", "C"}, {{0.5, 1.0}, {0.25}}, "one"));
    SUBCASE("identical inputs") {
        const std::vector<CValueMatrix> in{a, a, a};
        const auto acc = accumulate(in);
        CHECK(acc.material == "accumulated");
        CHECK(acc.elements == a.elements);
        CHECK((acc.values - a.values).cwiseAbs().maxCoeff() == 0.0);
        CHECK(acc.coverage(0, 1) == 3);
    }
    SUBCASE("partial coverage") {
        const auto b = scale_matrix(make_matrix({"B", "D"}, {{4.0}}, "two"));
        const std::vector<CValueMatrix> in{a, b};
        const auto acc = accumulate(in);
        CHECK(acc.elements == std::vector<std::string>{"A", "B", "C", "D"});
        const auto A = acc.index_of("A"), B = acc.index_of("B"), C = acc.index_of("C"), D = acc.index_of("D");
        CHECK(acc(A, B) == 0.5);
        CHECK(acc.coverage(0, 1) == 1);
        CHECK(acc(B, D) == 1.0);
        CHECK_FALSE(acc.present(A, D));
        CHECK_FALSE(acc.present(C, D));

        const std::vector<CValueMatrix> rev{b, a};
        const auto acc2 = accumulate(rev);
        CHECK(acc2.values == acc.values);
        CHECK(acc2.coverage == acc.coverage);
    }
    SUBCASE("mean of overlapping cells, order invariant") {
        const auto c = scale_matrix(make_matrix({"C", "A", "B"}, {{0.3, 1.0}, {0.7}}, "three"));
        std::vector<CValueMatrix> in{a, c};
        const auto acc = accumulate(in);
        CHECK(acc(acc.index_of("A"), acc.index_of("C")) == doctest::Approx((1.0 + 0.3) / 2));
        std::reverse(in.begin(), in.end());
        CHECK(accumulate(in).values == acc.values);
    }
    const std::vector<CValueMatrix> raw{make_matrix({"A", "B"}, {{2.0}})};
    CHECK_THROWS_AS(accumulate(raw), Error);
}

TEST_CASE("top curves") {
    const auto a = make_matrix({"A", "B", "C"}, {{2.0, 8.0}, {4.0}}, "one");
    const std::vector<CValueMatrix> single{a};
    const auto c = top_curves(single, 70);
    REQUIRE(c.size() == 1);
    CHECK(c[0].material == "one");
    CHECK(c[0].values == std::vector<double>{8.0, 4.0, 2.0});
    CHECK(top_curves(single, 2)[0].values.size() == 2);
}
