#include <gtest/gtest.h>

#include "itemaudit/cluster.hpp"
#include "oracles.hpp"

using namespace itemaudit;

namespace {

Matrix two_blobs() {
    Matrix x(20, 2);
    for (std::size_t i = 10; i < 20; ++i) x(i, 0) = x(i, 1) = 10.0;
    return x;
}

Matrix random_points(Rng& rng, std::size_t n, std::size_t dim, std::size_t blobs) {
    Matrix x(n, dim);
    for (std::size_t i = 0; i < n; ++i) {
        const double off = 4.0 * static_cast<double>(rng.index(blobs));
        for (std::size_t j = 0; j < dim; ++j) x(i, j) = off + rng.uniform() * 2.0 - 1.0;
    }
    return x;
}

} // namespace

TEST(KMeans, TwoBlobsExactCentroids) {
    const auto a = kmeans(two_blobs(), 2, 3);
    EXPECT_EQ(a.sse, 0.0);
    std::set<std::pair<double, double>> cs;
    for (std::size_t j = 0; j < 2; ++j) cs.insert({a.centroids(j, 0), a.centroids(j, 1)});
    EXPECT_EQ(cs, (std::set<std::pair<double, double>>{{0.0, 0.0}, {10.0, 10.0}}));
    for (std::size_t i = 1; i < 10; ++i) EXPECT_EQ(a.labels[i], a.labels[0]);
    EXPECT_NE(a.labels[0], a.labels[10]);
}

TEST(KMeans, KEqualsOneIsGrandMean) {
    Rng rng(4);
    const auto x = random_points(rng, 30, 3, 2);
    const auto a = kmeans(x, 1, 1);
    std::vector<double> mean(3, 0.0);
    for (std::size_t i = 0; i < 30; ++i)
        for (std::size_t j = 0; j < 3; ++j) mean[j] += x(i, j) / 30.0;
    double sse = 0.0;
    for (std::size_t i = 0; i < 30; ++i)
        for (std::size_t j = 0; j < 3; ++j) sse += (x(i, j) - mean[j]) * (x(i, j) - mean[j]);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(a.centroids(0, j), mean[j], 1e-12);
    EXPECT_NEAR(a.sse, sse, 1e-9);
}

TEST(KMeans, KEqualsNHasZeroSse) {
    Rng rng(5);
    const auto x = random_points(rng, 8, 2, 1);
    const auto a = kmeans(x, 8, 1);
    EXPECT_NEAR(a.sse, 0.0, 1e-12);
    EXPECT_EQ(std::set<std::size_t>(a.labels.begin(), a.labels.end()).size(), 8u);
}

TEST(KMeans, Errors) {
    EXPECT_THROW(kmeans(two_blobs(), 0, 1), AuditError);
    EXPECT_THROW(kmeans(two_blobs(), 21, 1), AuditError);
    EXPECT_THROW(kmeans(two_blobs(), 3, 1), AuditError); // only two distinct points
}

TEST(KMeansProperty, SseMonotoneAndCentroidIsMean) {
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 10 + rng.index(40), k = 1 + rng.index(5);
        const auto x = random_points(rng, n, 1 + rng.index(4), 1 + rng.index(4));
        const auto a = kmeans(x, k, rng.next());
        for (std::size_t i = 1; i < a.sse_trace.size(); ++i) EXPECT_LE(a.sse_trace[i], a.sse_trace[i - 1] + 1e-12);
        ASSERT_TRUE(a.converged);
        const auto sizes = a.cluster_sizes();
        for (std::size_t j = 0; j < k; ++j) {
            ASSERT_GT(sizes[j], 0u);
            for (std::size_t d = 0; d < x.cols(); ++d) {
                double m = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    if (a.labels[i] == j) m += x(i, d);
                EXPECT_NEAR(a.centroids(j, d), m / static_cast<double>(sizes[j]), 1e-9);
            }
        }
    }
}

TEST(KMeans, DeterministicGivenSeed) {
    Rng rng(8);
    const auto x = random_points(rng, 60, 3, 3);
    const auto a = kmeans_best_of(x, 3, 42, 5), b = kmeans_best_of(x, 3, 42, 5);
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_EQ(a.centroids, b.centroids);
}

TEST(SseCurve, TwoBlobs) {
    const auto curve = sse_curve(two_blobs(), {1, 2}, 1);
    EXPECT_GT(curve[0].second, 0.0);
    EXPECT_EQ(curve[1].second, 0.0);
    // k=3 exceeds the number of distinct points.
    EXPECT_THROW(sse_curve(two_blobs(), {3}, 1), AuditError);
    Matrix dup(5, 2, 1.5);
    EXPECT_EQ(sse_curve(dup, {1}, 1)[0].second, 0.0);
}

TEST(SseCurve, RandomBlobsRoughlyMonotone) {
    Rng rng(21);
    const auto x = random_points(rng, 120, 2, 4);
    const auto curve = sse_curve(x, {1, 2, 3, 4, 5, 6}, 7);
    for (std::size_t i = 1; i < curve.size(); ++i) EXPECT_LE(curve[i].second, curve[i - 1].second * 1.05);
}

TEST(Silhouette, MatchesBruteForceOracle) {
    Rng rng(123);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 3 + rng.index(48);
        const std::size_t k = 2 + rng.index(std::min<std::size_t>(n - 2, 5));
        Matrix x(n, 1 + rng.index(5));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) = rng.uniform() < 0.3 ? 0.0 : rng.uniform() * 3.0;
        std::vector<std::size_t> labels(n);
        for (std::size_t i = 0; i < n; ++i) labels[i] = i < k ? i : rng.index(k);
        const double s = silhouette(x, labels);
        EXPECT_NEAR(s, oracle::silhouette(x, labels), 1e-9);
        EXPECT_GE(s, -1.0);
        EXPECT_LE(s, 1.0);
    }
}

TEST(Silhouette, Conventions) {
    Matrix tight(20, 2);
    for (std::size_t i = 0; i < 20; ++i) {
        tight(i, 0) = i < 10 ? 0.01 * i : 100.0 + 0.01 * i;
        tight(i, 1) = 0.0;
    }
    std::vector<std::size_t> lab(20);
    for (std::size_t i = 10; i < 20; ++i) lab[i] = 1;
    EXPECT_GT(silhouette(tight, lab), 0.9);
    Matrix same(6, 2, 1.0);
    EXPECT_EQ(silhouette(same, {0, 0, 0, 1, 1, 1}), 0.0);
    EXPECT_THROW(silhouette(same, {0, 0, 0, 0, 0, 0}), AuditError);
    EXPECT_THROW(silhouette(same, {0, 1, 2, 3, 4, 5}), AuditError);
    EXPECT_THROW(silhouette(same, {0, 0, 2, 2, 2, 2}), AuditError); // empty cluster 1
}

TEST(ChooseK, PublishedScoresPickFive) {
    const std::vector<std::pair<std::size_t, double>> scores = {{2, 0.358}, {3, 0.385}, {4, 0.405},
                                                                {5, 0.412}, {6, 0.404}, {7, 0.393}};
    EXPECT_EQ(choose_k(scores), 5u);
    EXPECT_EQ(choose_k({{3, 0.5}, {2, 0.5}, {4, 0.1}}), 2u);
    EXPECT_THROW(choose_k({}), AuditError);
}

TEST(SelectK, TwoBlobsAndRangeChecks) {
    Rng rng(3);
    Matrix x(40, 2);
    for (std::size_t i = 0; i < 40; ++i) {
        x(i, 0) = (i < 20 ? 0.0 : 50.0) + rng.uniform();
        x(i, 1) = rng.uniform();
    }
    const auto r = select_k(x, 2, 7, 1);
    EXPECT_EQ(r.selection.chosen_k, 2u);
    EXPECT_EQ(r.selection.sse_curve.front().first, 1u);
    EXPECT_EQ(r.selection.sse_curve.size(), 7u);
    EXPECT_EQ(r.selection.silhouette_scores.size(), 6u);
    EXPECT_THROW(select_k(x, 1, 3, 1), AuditError);
    EXPECT_THROW(select_k(x, 2, 40, 1), AuditError);
}

TEST(Purity, Basic) {
    EXPECT_EQ(cluster_purity({0, 0, 1, 1}, {5, 5, 7, 7}), 1.0);
    EXPECT_EQ(cluster_purity({0, 0, 0, 0}, {5, 5, 7, 7}), 0.5);
}
