#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "threatcluster/optics.hpp"

using namespace tc;

namespace {

struct Case {
  std::string name;
  std::size_t min_samples;
  DistanceMatrix dm;
  std::vector<int> labels;
  std::vector<std::size_t> ordering;
  std::vector<double> reachability, core_distances;
};

std::vector<Case> load_cases() {
  std::ifstream in(std::string(TC_TEST_DATA_DIR) + "/optics_oracle.json");
  const auto j = nlohmann::json::parse(in);
  auto num = [](const nlohmann::json& v) {
    return v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>();
  };
  std::vector<Case> out;
  for (const auto& c : j.at("cases")) {
    Case k;
    k.name = c.at("name");
    k.min_samples = c.at("min_samples");
    std::vector<double> flat;
    std::size_t dim = 0;
    for (const auto& p : c.at("points")) {
      dim = p.size();
      for (const auto& x : p) flat.push_back(x.get<double>());
    }
    const std::size_t n = flat.size() / dim;
    k.dm = pairwise(EmbeddingMatrix::dense(EmbeddingKind::doc2vec, n, dim, flat), Metric::euclidean);
    k.labels = c.at("labels").get<std::vector<int>>();
    k.ordering = c.at("ordering").get<std::vector<std::size_t>>();
    for (const auto& v : c.at("reachability")) k.reachability.push_back(num(v));
    for (const auto& v : c.at("core_distances")) k.core_distances.push_back(num(v));
    out.push_back(std::move(k));
  }
  return out;
}

DistanceMatrix line(const std::vector<double>& xs) {
  return pairwise(EmbeddingMatrix::dense(EmbeddingKind::doc2vec, xs.size(), 1, xs), Metric::euclidean);
}

}  // namespace

TEST(Optics, MatchesReferenceImplementation) {
  const auto cases = load_cases();
  ASSERT_GE(cases.size(), 9u);
  for (const auto& c : cases) {
    SCOPED_TRACE(c.name);
    const auto r = optics(c.dm, c.min_samples);
    EXPECT_EQ(r.ordering, c.ordering);
    ASSERT_EQ(r.reachability.size(), c.reachability.size());
    for (std::size_t i = 0; i < c.reachability.size(); ++i) {
      if (std::isinf(c.reachability[i])) {
        EXPECT_TRUE(std::isinf(r.reachability[i])) << i;
      } else {
        EXPECT_NEAR(r.reachability[i], c.reachability[i], 1e-12) << i;
      }
      EXPECT_NEAR(r.core_distances[i], c.core_distances[i], 1e-12) << i;
    }
    EXPECT_EQ(r.clustering, make_clustering(c.labels));
  }
}

TEST(Optics, TwoSeparatedGroupsGiveTwoClusters) {
  for (const auto& c : load_cases())
    if (c.name == "two_rings") {
      const auto r = optics(c.dm, 2);
      EXPECT_EQ(r.clustering.n_clusters, 2);
      EXPECT_FALSE(r.clustering.has_noise());
    }
}

TEST(Optics, FewerPointsThanMinSamplesIsAllNoise) {
  const auto r = optics(line({0, 1}), 3);
  EXPECT_EQ(r.clustering.n_clusters, 0);
  EXPECT_TRUE(r.clustering.has_noise());
  EXPECT_EQ(r.clustering.size(), 2u);
}

TEST(Optics, RejectsBadParameters) {
  EXPECT_THROW(optics(line({0, 1, 2}), 1), std::invalid_argument);
  EXPECT_THROW(optics(line({0, 1, 2}), 2, 0.0), std::invalid_argument);
  EXPECT_THROW(optics(line({0, 1, 2}), 2, 1.0), std::invalid_argument);
}

TEST(Optics, EquidistantPointsAreDeterministic) {
  const auto dm = line({0, 1, 2, 3, 4, 5, 6, 7});
  const auto a = optics(dm, 2);
  const auto b = optics(dm, 2);
  EXPECT_EQ(a.ordering, b.ordering);
  EXPECT_EQ(a.clustering, b.clustering);
  // ties go to the lowest index, so a regular line is walked left to right
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(a.ordering[i], i);
}

TEST(Optics, OrderingIsAPermutation) {
  for (const auto& c : load_cases()) {
    auto ord = optics(c.dm, c.min_samples).ordering;
    std::sort(ord.begin(), ord.end());
    for (std::size_t i = 0; i < ord.size(); ++i) EXPECT_EQ(ord[i], i);
  }
}
