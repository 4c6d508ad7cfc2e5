#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "test_support.hpp"
#include "tcn/error.hpp"
#include "tcn/linalg.hpp"
#include "tcn/similarity.hpp"
#include "tcn/synthetic.hpp"

using namespace tcn;

namespace {

void expect_rows_normalized(const SimilarityMatrix& s) {
    for (std::size_t k = 0; k < s.values.rows(); ++k) {
        double sum = 0.0;
        for (double v : s.values.row(k)) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
            sum += v;
        }
        EXPECT_NEAR(sum, 1.0, 1e-9);
    }
}

std::size_t argmax(std::span<const double> row) {
    return static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
}

}  // namespace

TEST(ClassSimilarity, ExactReconstructionIsOneHot) {
    // Class 0 is the source; class 2 equals it, classes 1 and 3 are orthogonal to it.
    const Matrix semantics{{0.0, 2.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 2.0, 0.0}, {0.0, 0.0, 3.0}};
    const auto s = class_similarity(semantics, {0}, {1, 2, 3}, 1e-9);
    EXPECT_NEAR(s.values(0, 0), 0.0, 1e-6);
    EXPECT_NEAR(s.values(0, 1), 1.0, 1e-6);
    EXPECT_NEAR(s.values(0, 2), 0.0, 1e-6);
    EXPECT_EQ(s.row_of(0), 0u);
    EXPECT_THROW(s.row_of(1), Error);
}

TEST(ClassSimilarity, RowsAreDistributions) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        const Matrix semantics = oracle::random_matrix(9, 5, rng);
        const auto s = class_similarity(semantics, {0, 1, 2, 3, 4}, {5, 6, 7, 8}, 1e-3);
        EXPECT_EQ(s.values.rows(), 5u);
        EXPECT_EQ(s.values.cols(), 4u);
        expect_rows_normalized(s);
    }
}

TEST(ClassSimilarity, MatchesClampedRidgeOracle) {
    std::mt19937_64 rng(4);
    const Matrix semantics = oracle::random_matrix(5, 6, rng);
    const auto s = class_similarity(semantics, {0, 1}, {2, 3, 4}, 0.1);
    Matrix design(6, 3), b(6, 1);
    for (std::size_t k = 0; k < 2; ++k) {
        for (std::size_t t = 0; t < 6; ++t) {
            for (std::size_t j = 0; j < 3; ++j) design(t, j) = semantics(2 + j, t);
            b(t, 0) = semantics(k, t);
        }
        auto coeff = oracle::ridge_descent(design, b, 0.1);
        double total = 0.0;
        for (double& c : coeff) total += (c = std::max(0.0, c));
        if (total == 0.0) continue;
        for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(s.values(k, j), coeff[j] / total, 1e-6);
    }
}

TEST(ClassSimilarity, ConcentratesOnTrueMixtureSupport) {
    SyntheticSpec spec;
    spec.noise_sigma = 0.0;
    spec.purity = 1.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        spec.seed = seed;
        const auto data = generate_synthetic(spec);
        const auto& d = data.dataset;
        const auto s = class_similarity(d.semantics, d.source_classes, d.target_classes, 1e-3);
        for (std::size_t k = 0; k < d.source_classes.size(); ++k) {
            double mass = 0.0;
            bool in_support = false;
            for (std::size_t j = 0; j < d.target_classes.size(); ++j) {
                if (data.mixtures(j, k) > 0.0) {
                    mass += s.values(k, j);
                    in_support = true;
                }
            }
            if (in_support) {
                EXPECT_GE(mass, 0.8) << "seed " << seed << " source " << k;
            }
        }
    }
}

TEST(ClassSimilarity, ArgmaxInvariantToSemanticScale) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix semantics = oracle::random_matrix(7, 8, rng);
        // A tiny beta keeps the ridge solution close to the scale-free least squares one.
        const auto base = class_similarity(semantics, {0, 1, 2, 3}, {4, 5, 6}, 1e-9);
        for (double c : {0.5, 3.0, 40.0}) {
            const auto scaled = class_similarity(scale(semantics, c), {0, 1, 2, 3}, {4, 5, 6}, 1e-9);
            for (std::size_t k = 0; k < 4; ++k)
                EXPECT_EQ(argmax(scaled.values.row(k)), argmax(base.values.row(k)));
        }
    }
}

TEST(ClassSimilarity, OrthonormalSemanticsFallBackToUniform) {
    const Matrix semantics = Matrix::identity(5);
    for (double beta : {1e9, 1e12}) {
        const auto s = class_similarity(semantics, {0, 1}, {2, 3, 4}, beta);
        for (double v : s.values.values()) EXPECT_EQ(v, 1.0 / 3.0);
    }
}

TEST(ClassSimilarity, Errors) {
    const Matrix semantics = Matrix::identity(3);
    EXPECT_THROW(class_similarity(semantics, {0}, {1}, 0.0), Error);
    EXPECT_THROW(class_similarity(semantics, {}, {1}, 1.0), Error);
    EXPECT_THROW(class_similarity(semantics, {0}, {5}, 1.0), Error);
}

TEST(ExportSimilarity, FormatAndRoundTrip) {
    tcn::testing::TempDir dir;
    SimilarityMatrix s{Matrix{{0.1, 0.9}, {1.0 / 3.0, 2.0 / 3.0}}, {0, 1}, {5, 7}};
    export_similarity(s, dir / "s.csv");
    const std::string text = tcn::testing::slurp(dir / "s.csv");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
    EXPECT_EQ(text.rfind("source,5,7\n", 0), 0u);
    const auto back = read_similarity_csv(dir / "s.csv");
    EXPECT_EQ(back.source_order, s.source_order);
    EXPECT_EQ(back.target_order, s.target_order);
    EXPECT_LT(max_abs(subtract(back.values, s.values)), 1e-12);
}

TEST(ExportSimilarity, UniformFallbackRow) {
    tcn::testing::TempDir dir;
    const auto s = class_similarity(Matrix::identity(4), {0}, {1, 2, 3}, 1.0);
    export_similarity(s, dir / "s.csv");
    const auto back = read_similarity_csv(dir / "s.csv");
    for (double v : back.values.values()) EXPECT_EQ(v, 1.0 / 3.0);
    EXPECT_NE(tcn::testing::slurp(dir / "s.csv").find("0,0.33333333333333331,0.33333333333333331,0.33333333333333331"),
              std::string::npos);
}
