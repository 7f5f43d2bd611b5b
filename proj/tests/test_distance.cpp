#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support/synthetic.hpp"
#include "threatcluster/distance.hpp"
#include "threatcluster/harness.hpp"

using namespace tc;

namespace {

EmbeddingMatrix random_dense(std::size_t rows, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> v(rows * dim);
  for (auto& x : v) x = g(rng);
  return EmbeddingMatrix::dense(EmbeddingKind::doc2vec, rows, dim, std::move(v));
}

}  // namespace

TEST(Distance, Examples) {
  const std::vector<double> o{0, 0}, p{3, 4}, a{1, 2}, b{4, 6}, x{1, 0}, y{0, 1};
  EXPECT_DOUBLE_EQ(distance(o, p, Metric::euclidean), 5.0);
  EXPECT_DOUBLE_EQ(distance(a, b, Metric::manhattan), 7.0);
  EXPECT_DOUBLE_EQ(distance(x, y, Metric::cosine), 1.0);
}

TEST(Distance, ZeroVectorConvention) {
  const std::vector<double> z{0, 0}, x{1, 2};
  EXPECT_EQ(distance(z, z, Metric::cosine), 0.0);
  EXPECT_EQ(distance(z, x, Metric::cosine), 1.0);
  EXPECT_EQ(distance(x, z, Metric::cosine), 1.0);
  EXPECT_EQ(distance(x, x, Metric::cosine), 0.0);
}

TEST(Distance, DimensionMismatchThrows) {
  const std::vector<double> a{1, 2}, b{1, 2, 3};
  EXPECT_THROW(distance(a, b, Metric::euclidean), std::invalid_argument);
}

TEST(Pairwise, SingleRowAndDuplicates) {
  const auto one = random_dense(1, 4, 1);
  const auto dm = pairwise(one, Metric::euclidean);
  EXPECT_EQ(dm.size(), 1u);
  EXPECT_EQ(dm(0, 0), 0.0);

  std::vector<double> v{1, 2, 3, 1, 2, 3, 0, 1, 0};
  const auto m = EmbeddingMatrix::dense(EmbeddingKind::doc2vec, 3, 3, v);
  for (auto metric : kAllMetrics) EXPECT_EQ(pairwise(m, metric)(0, 1), 0.0);
}

TEST(Pairwise, DenseAgreesWithScalar) {
  const auto m = random_dense(20, 8, 42);
  for (auto metric : kAllMetrics) {
    const auto dm = pairwise(m, metric, 3);
    for (std::size_t i = 0; i < 20; ++i)
      for (std::size_t j = 0; j < 20; ++j) {
        const double expect = i == j ? 0.0 : distance(m.dense_row(i), m.dense_row(j), metric);
        EXPECT_NEAR(dm(i, j), expect, 1e-9);
        EXPECT_EQ(dm(i, j), dm(j, i));
        EXPECT_GE(dm(i, j), 0.0);
      }
  }
}

TEST(Pairwise, SparseAgreesWithDensified) {
  const auto corpus = synth::report_like_corpus(1);
  const auto m = embed_tfidf(corpus, EmbeddingKind::tfidf2, english_stopwords());
  for (auto metric : kAllMetrics) {
    const auto dm = pairwise(m, metric);
    for (std::size_t i = 0; i < 30; ++i)
      for (std::size_t j = 0; j < 30; ++j) {
        const double expect = distance(m.to_dense_row(i), m.to_dense_row(j), metric);
        EXPECT_NEAR(dm(i, j), expect, 1e-12);
      }
    if (metric == Metric::cosine)
      for (std::size_t i = 0; i < dm.size(); ++i)
        for (std::size_t j = 0; j < dm.size(); ++j) {
          EXPECT_LE(dm(i, j), 2.0);
        }
  }
}

TEST(Pairwise, IndependentOfWorkerCount) {
  const auto m = random_dense(57, 5, 7);
  for (auto metric : kAllMetrics) EXPECT_EQ(pairwise(m, metric, 1), pairwise(m, metric, 4));
}

TEST(DistanceProperties, TriangleInequalityAndNormalizedIdentity) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> dims(1, 50);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = static_cast<std::size_t>(dims(rng));
    std::vector<double> u(d), v(d), w(d);
    for (std::size_t k = 0; k < d; ++k) {
      u[k] = g(rng);
      v[k] = g(rng);
      w[k] = g(rng);
    }
    for (auto metric : {Metric::euclidean, Metric::manhattan})
      EXPECT_LE(distance(u, w, metric), distance(u, v, metric) + distance(v, w, metric) + 1e-9);
    auto normalize = [](std::vector<double>& x) {
      double s = 0;
      for (double e : x) s += e * e;
      for (double& e : x) e /= std::sqrt(s);
    };
    normalize(u);
    normalize(v);
    const double e = distance(u, v, Metric::euclidean);
    EXPECT_NEAR(e * e, 2 * distance(u, v, Metric::cosine), 1e-6);
  }
}
