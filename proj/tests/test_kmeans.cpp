#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "threatcluster/kmeans.hpp"

using namespace tc;

namespace {

EmbeddingMatrix points(const std::vector<std::vector<double>>& xs) {
  std::vector<double> v;
  for (const auto& x : xs) v.insert(v.end(), x.begin(), x.end());
  return EmbeddingMatrix::dense(EmbeddingKind::doc2vec, xs.size(), xs.empty() ? 0 : xs[0].size(), v);
}

// Gaussian blobs around well separated centres, away from the origin so
// cosine separates them as well.
EmbeddingMatrix blobs(std::size_t k, std::size_t per, std::uint64_t seed, std::vector<int>* truth = nullptr) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0, 0.05);
  std::vector<std::vector<double>> xs;
  for (std::size_t c = 0; c < k; ++c) {
    const double angle = 2.0 * M_PI * static_cast<double>(c) / static_cast<double>(k);
    for (std::size_t i = 0; i < per; ++i) {
      xs.push_back({10 * std::cos(angle) + g(rng), 10 * std::sin(angle) + g(rng), 1 + g(rng)});
      if (truth) truth->push_back(static_cast<int>(c));
    }
  }
  std::vector<std::size_t> order(xs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<double>> shuffled;
  std::vector<int> t;
  for (auto i : order) {
    shuffled.push_back(xs[i]);
    if (truth) t.push_back((*truth)[i]);
  }
  if (truth) *truth = t;
  return points(shuffled);
}

// same partition up to relabelling
bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  return make_clustering(a) == make_clustering(b);
}

}  // namespace

TEST(KMeans, SeparatesObviousGroups) {
  const auto m = points({{0, 0}, {0, 1}, {1, 0}, {20, 20}, {20, 21}, {21, 20}});
  for (auto metric : {Metric::euclidean, Metric::manhattan})
    for (auto init : {KMeansInit::plus_plus, KMeansInit::random})
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto r = kmeans(m, metric, {2, seed, 300, init});
        EXPECT_TRUE(same_partition(r.clustering.assignment, {0, 0, 0, 1, 1, 1}));
      }
}

TEST(KMeans, KEqualsNGivesZeroInertia) {
  const auto m = points({{0, 0}, {3, 1}, {1, 5}, {7, 7}});
  for (auto metric : kAllMetrics) {
    const auto r = kmeans(m, metric, {4, 3});
    EXPECT_EQ(r.clustering.n_clusters, 4);
    EXPECT_NEAR(r.inertia, 0.0, 1e-12);
  }
}

TEST(KMeans, RejectsBadK) {
  const auto m = points({{0, 0}, {1, 1}});
  EXPECT_THROW(kmeans(m, Metric::euclidean, {0}), std::invalid_argument);
  EXPECT_THROW(kmeans(m, Metric::euclidean, {3}), std::invalid_argument);
}

TEST(KMeans, DeterministicForSeed) {
  const auto m = blobs(4, 25, 3);
  for (auto metric : kAllMetrics) {
    const auto a = kmeans(m, metric, {4, 17});
    const auto b = kmeans(m, metric, {4, 17});
    EXPECT_EQ(a.clustering, b.clustering);
    EXPECT_EQ(a.inertia, b.inertia);
  }
}

TEST(KMeans, RecoversBlobs) {
  std::vector<int> truth;
  const auto m = blobs(5, 30, 8, &truth);
  for (auto metric : kAllMetrics) {
    const auto r = kmeans(m, metric, {5, 1});
    EXPECT_TRUE(same_partition(r.clustering.assignment, truth)) << to_string(metric);
  }
}

TEST(KMeans, NoEmptyClustersWithDuplicates) {
  const auto m = points({{1, 1}, {1, 1}, {1, 1}, {1, 1}, {5, 5}});
  for (auto init : {KMeansInit::plus_plus, KMeansInit::random}) {
    const auto r = kmeans(m, Metric::euclidean, {3, 0, 300, init});
    EXPECT_EQ(r.clustering.n_clusters, 3);
    for (auto s : cluster_sizes(r.clustering)) EXPECT_GE(s, 1u);
  }
}

TEST(Silhouette, MatchesBruteForce) {
  const auto m = points({{0}, {1}, {10}, {11}});
  const auto dm = pairwise(m, Metric::euclidean);
  const auto c = make_clustering({0, 0, 1, 1});
  // a = 1 for every point; b = 10.5 for the outer and 9.5 for the inner points
  const double expect = (2 * (1 - 1 / 10.5) + 2 * (1 - 1 / 9.5)) / 4;
  EXPECT_NEAR(silhouette(dm, c), expect, 1e-12);
}

TEST(Silhouette, SingletonsScoreZero) {
  const auto m = points({{0}, {1}, {10}});
  const auto dm = pairwise(m, Metric::euclidean);
  // points 0,1: a = 1, b = 10 and 9; point 2 alone scores 0
  EXPECT_NEAR(silhouette(dm, make_clustering({0, 0, 1})), ((1 - 1 / 10.0) + (1 - 1 / 9.0)) / 3, 1e-12);
}

TEST(Silhouette, RejectsDegenerateInput) {
  const auto dm = pairwise(points({{0}, {1}, {2}}), Metric::euclidean);
  EXPECT_THROW(silhouette(dm, make_clustering({0, 0, 0})), std::invalid_argument);
  EXPECT_THROW(silhouette(dm, make_clustering({0, 1, -1})), std::invalid_argument);
  EXPECT_THROW(silhouette(dm, make_clustering({0, 1})), std::invalid_argument);
}

TEST(AutoKMeans, FindsThreeBlobs) {
  std::vector<int> truth;
  const auto m = blobs(3, 20, 4, &truth);
  for (auto metric : kAllMetrics) {
    const auto r = auto_kmeans(m, metric, 0);
    EXPECT_EQ(r.k, 3u) << to_string(metric);
    EXPECT_TRUE(same_partition(r.clustering.assignment, truth));
    EXPECT_EQ(r.sweep.size(), 6u);  // k = 2..7
    for (double s : r.sweep) EXPECT_LE(s, r.silhouette);
  }
}

TEST(AutoKMeans, FourPointsMeansTwoClusters) {
  const auto r = auto_kmeans(points({{0}, {1}, {10}, {11}}), Metric::euclidean, 0);
  EXPECT_EQ(r.k, 2u);
  EXPECT_TRUE(same_partition(r.clustering.assignment, {0, 0, 1, 1}));
}

TEST(AutoKMeans, NeedsFourPoints) {
  EXPECT_THROW(auto_kmeans(points({{0}, {1}, {2}}), Metric::euclidean, 0), std::invalid_argument);
}

TEST(AutoKMeans, ScaleInvariant) {
  const auto m = blobs(4, 12, 21);
  for (auto metric : kAllMetrics) {
    const auto base = auto_kmeans(m, metric, 5);
    for (double lambda : {4.0, 0.5}) {
      const auto r = auto_kmeans(m.scaled(lambda), metric, 5);
      EXPECT_EQ(r.k, base.k);
      EXPECT_EQ(r.clustering, base.clustering);
    }
  }
}

TEST(AutoKMeans, WorkerCountDoesNotMatter) {
  const auto m = blobs(3, 15, 2);
  EXPECT_EQ(auto_kmeans(m, Metric::cosine, 1, 1).clustering, auto_kmeans(m, Metric::cosine, 1, 4).clustering);
}
