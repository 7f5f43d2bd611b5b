#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "support/synthetic.hpp"
#include "support/tempdir.hpp"
#include "threatcluster/dense_io.hpp"

using namespace tc;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LabeledCorpus ids(std::initializer_list<const char*> names) {
  std::vector<Document> docs;
  for (auto n : names) docs.push_back({n, "", std::nullopt});
  return LabeledCorpus(std::move(docs));
}

}  // namespace

TEST(DenseIo, WritesHeaderAndRows) {
  tc::testing::TempDir dir;
  const std::vector<VectorRow> rows{{"a", {1, 2, 3}}, {"b", {0.5, -0.25, 0}}};
  write_vectors(dir / "v.vec", {3, EmbeddingKind::sbert_h, "all-distilroberta-v1", 2}, rows);
  EXPECT_EQ(slurp(dir / "v.vec"),
            "#threatcluster-vectors v1 dim=3 kind=sbert_h model=all-distilroberta-v1 count=2\n"
            "a\t1,2,3\nb\t0.5,-0.25,0\n");
}

TEST(DenseIo, WrongDimensionNamesId) {
  tc::testing::TempDir dir;
  const std::vector<VectorRow> rows{{"a", {1, 2, 3}}, {"bad-one", {1, 2}}};
  try {
    write_vectors(dir / "v.vec", {3, EmbeddingKind::doc2vec, "m", 2}, rows);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("bad-one"), std::string::npos);
  }
}

TEST(DenseIo, ZeroRowsIsValid) {
  tc::testing::TempDir dir;
  write_vectors(dir / "v.vec", {4, EmbeddingKind::sbert_t, "m", 0}, {});
  const auto f = read_vector_file(dir / "v.vec");
  EXPECT_EQ(f.header.count, 0u);
  EXPECT_TRUE(f.rows.empty());
  EXPECT_EQ(read_vectors(dir / "v.vec", LabeledCorpus{}).rows(), 0u);
}

TEST(DenseIo, RoundTripReordersToCorpus) {
  tc::testing::TempDir dir;
  const std::vector<VectorRow> rows{{"x", {0.1, 0.2}}, {"y", {0.3, 0.4}}, {"z", {0.5, 0.6}}};
  write_vectors(dir / "v.vec", {2, EmbeddingKind::sbert_ht, "model with spaces", 3}, rows);
  const auto f = read_vector_file(dir / "v.vec");
  EXPECT_EQ(f.header.model_name, "model with spaces");
  EXPECT_EQ(f.header.kind, EmbeddingKind::sbert_ht);
  const auto m = read_vectors(dir / "v.vec", ids({"z", "x", "y"}));
  EXPECT_EQ(m.kind(), EmbeddingKind::sbert_ht);
  EXPECT_NEAR(m.dense_row(0)[0], 0.5, 1e-6);
  EXPECT_NEAR(m.dense_row(1)[1], 0.2, 1e-6);
  EXPECT_NEAR(m.dense_row(2)[0], 0.3, 1e-6);
}

TEST(DenseIo, MissingAndExtraIdsNamed) {
  tc::testing::TempDir dir;
  write_vectors(dir / "v.vec", {1, EmbeddingKind::doc2vec, "m", 2}, std::vector<VectorRow>{{"a", {1}}, {"b", {2}}});
  try {
    read_vectors(dir / "v.vec", ids({"a", "b", "c"}));
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("\"c\""), std::string::npos);
  }
  try {
    read_vectors(dir / "v.vec", ids({"a"}));
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("\"b\""), std::string::npos);
  }
}

TEST(DenseIo, RejectsNanAndMalformed) {
  tc::testing::TempDir dir;
  const std::string header = "#threatcluster-vectors v1 dim=2 kind=doc2vec model=m count=1\n";
  auto expect_bad = [&](const std::string& body, const std::string& needle) {
    std::ofstream(dir / "bad.vec", std::ios::binary) << body;
    try {
      read_vector_file(dir / "bad.vec");
      ADD_FAILURE() << "accepted: " << body;
    } catch (const InputError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  expect_bad(header + "row7\t1,nan\n", "row7");
  expect_bad(header + "row7\t1,inf\n", "row7");
  expect_bad(header + "r\t1\n", "dimension");
  expect_bad(header + "r\t1,2\nq\t3,4\n", "count");
  expect_bad(header + "r\t1;2\n", "malformed");
  expect_bad("#threatcluster-vectors v1 dim=2 kind=tfidf1 model=m count=0\n", "kind");
  expect_bad("#threatcluster-vectors v2 dim=2 kind=doc2vec model=m count=0\n", "magic");
  expect_bad("#threatcluster-vectors v1 dim=0 kind=doc2vec model=m count=0\n", "dim");
}

TEST(DenseIo, WriteReadWriteIsByteIdentical) {
  tc::testing::TempDir dir;
  const auto corpus = synth::recovery_corpus();
  auto rows = synth::stub_vectors(corpus, 24, 9);
  std::mt19937_64 rng(1);
  for (auto& r : rows)
    for (auto& v : r.values) v *= std::ldexp(1.0, static_cast<int>(rng() % 40) - 20);
  const VectorFileHeader h{24, EmbeddingKind::sbert_h, "stub", rows.size()};
  write_vectors(dir / "a.vec", h, rows);
  const auto f = read_vector_file(dir / "a.vec");
  write_vectors(dir / "b.vec", f.header, f.rows);
  EXPECT_EQ(slurp(dir / "a.vec"), slurp(dir / "b.vec"));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < 24; ++j)
      EXPECT_NEAR(f.rows[i].values[j], rows[i].values[j], std::abs(rows[i].values[j]) * 1e-8);
}
