#include <gtest/gtest.h>

#include <fstream>

#include "support/synthetic.hpp"
#include "support/tempdir.hpp"
#include "threatcluster/config.hpp"
#include "threatcluster/report.hpp"

using namespace tc;

namespace {

EvalRow sample_row() {
  EvalRow r;
  r.rank = 1;
  r.clusterer = ClustererKind::dbscan;
  r.embedding = EmbeddingKind::sbert_h;
  r.metric = Metric::cosine;
  r.h = 0.96;
  r.c = 0.61;
  r.v = 0.75;
  r.n_clusters = 169;
  r.reduction_percent = 34.75;
  return r;
}

}  // namespace

TEST(Report, MarkdownRow) {
  const std::vector<EvalRow> rows{sample_row()};
  const auto md = render_markdown(rows);
  EXPECT_NE(md.find("| 1 | DBS | SBERT_H | cos. | 0.96 | 0.61 | 0.75 | 169 | 34.75 |\n"), std::string::npos)
      << md;
  EXPECT_EQ(md.rfind("| rank | clusterer | embedding | distance | H | C | V | #C | Red% |\n", 0), 0u);
}

TEST(Report, EmptyTableIsHeaderOnly) {
  const auto md = render_markdown({});
  EXPECT_EQ(std::count(md.begin(), md.end(), '\n'), 2);
  const auto csv = render_csv({});
  EXPECT_EQ(csv, "rank,clusterer,embedding,distance,H,C,V,#C,Red%,t_embed,t_cluster,error\n");
  EXPECT_TRUE(parse_csv(csv).empty());
}

TEST(Report, CsvRoundTrip) {
  auto a = sample_row();
  a.h = 1.0 / 3.0;
  a.t_embed = 0.125;
  a.t_cluster = 2.5e-7;
  EvalRow b;
  b.rank = 2;
  b.clusterer = ClustererKind::optics;
  b.embedding = EmbeddingKind::doc2vec;
  b.metric = Metric::manhattan;
  b.error = "bad \"file\", line 3\nsecond line";
  const std::vector<EvalRow> rows{a, b};
  const auto back = parse_csv(render_csv(rows));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0], a);
  EXPECT_EQ(back[1], b);
}

TEST(Report, CsvRejectsGarbage) {
  EXPECT_THROW(parse_csv(""), InputError);
  EXPECT_THROW(parse_csv("a,b\n"), InputError);
  EXPECT_THROW(parse_csv(render_csv({}) + "1,kmeans\n"), InputError);
  EXPECT_THROW(parse_csv(render_csv({}) + "1,nope,tfidf1,cosine,0,0,0,1,0,0,0,\n"), InputError);
  EXPECT_THROW(parse_csv(render_csv({}) + "1,kmeans,tfidf1,cosine,x,0,0,1,0,0,0,\n"), InputError);
  EXPECT_THROW(parse_csv(render_csv({}) + "1,kmeans,tfidf1,cosine,0,0,0,1,0,0,0,\"open\n"), InputError);
}

TEST(Report, WritesFilesAndAssignments) {
  tc::testing::TempDir dir;
  const auto corpus = synth::recovery_corpus();
  RunConfig cfg;
  cfg.embeddings = {EmbeddingKind::tfidf1, EmbeddingKind::sbert_t};
  cfg.metrics = {Metric::cosine};
  cfg.clusterers = {ClustererKind::dbscan};
  const auto results = run_matrix(corpus, cfg);
  write_reports(dir / "out", corpus, results, 0.4);
  EXPECT_TRUE(std::filesystem::exists(dir / "out/report.md"));
  std::ifstream csv(dir / "out/report.csv");
  std::stringstream ss;
  ss << csv.rdbuf();
  EXPECT_EQ(parse_csv(ss.str()).size(), 2u);
  const auto assign = dir / "out/assignments/dbscan_tfidf1_cosine.csv";
  ASSERT_TRUE(std::filesystem::exists(assign));
  EXPECT_FALSE(std::filesystem::exists(dir / "out/assignments/dbscan_sbert_t_cosine.csv"));
  std::ifstream in(assign);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "doc_id,cluster_id");
  std::size_t lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, corpus.size());
}

TEST(Report, NoiseWrittenAsMinusOne) {
  const LabeledCorpus corpus({{"a", "x", std::nullopt}, {"b,c", "y", std::nullopt}});
  EXPECT_EQ(render_assignments(corpus, make_clustering({0, -1})), "doc_id,cluster_id\na,0\n\"b,c\",-1\n");
}

TEST(Config, ParsesAllKeys) {
  const auto cfg = parse_config(
      "# comment\n"
      "corpus = data/c.jsonl\n"
      "out_dir = /tmp/o\n"
      "embeddings = tfidf1, sbert_h  # trailing\n"
      "metrics = all\n"
      "clusterers = optics\n"
      "beta = 0.5\nseed = 7\nthreshold = 0\nworkers = 3\n"
      "stopwords = sw.txt\nsingletons_to_unlabeled = false\noptics_min_samples = 4\n"
      "vectors.sbert_h = v/h.vec\n",
      "/base");
  EXPECT_EQ(cfg.corpus, std::filesystem::path("/base/data/c.jsonl"));
  EXPECT_EQ(cfg.out_dir, std::filesystem::path("/tmp/o"));
  EXPECT_EQ(cfg.embeddings, (std::vector{EmbeddingKind::tfidf1, EmbeddingKind::sbert_h}));
  EXPECT_EQ(cfg.metrics.size(), 3u);
  EXPECT_EQ(cfg.clusterers, std::vector{ClustererKind::optics});
  EXPECT_DOUBLE_EQ(cfg.beta, 0.5);
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.threshold, 0.0);
  EXPECT_EQ(cfg.workers, 3u);
  EXPECT_EQ(*cfg.stopwords, std::filesystem::path("/base/sw.txt"));
  EXPECT_FALSE(cfg.singletons_to_unlabeled);
  EXPECT_EQ(cfg.optics_min_samples, 4u);
  EXPECT_EQ(cfg.vectors.at(EmbeddingKind::sbert_h), std::filesystem::path("/base/v/h.vec"));
}

TEST(Config, Defaults) {
  const auto cfg = parse_config("corpus = c.jsonl\n");
  EXPECT_EQ(cfg.embeddings.size(), 7u);
  EXPECT_EQ(cfg.metrics.size(), 3u);
  EXPECT_EQ(cfg.clusterers.size(), 3u);
  EXPECT_DOUBLE_EQ(cfg.threshold, 0.4);
  EXPECT_DOUBLE_EQ(cfg.beta, 1.0);
}

TEST(Config, RejectsBadInput) {
  for (const char* text : {"", "corpus = a\nthreshold = 1.1\n", "corpus = a\nthreshold = -0.1\n",
                           "corpus = a\ncolour = red\n", "corpus = a\nembeddings = ,\n",
                           "corpus = a\nmetrics = cosine, cosine\n", "corpus = a\nmetrics = hamming\n",
                           "corpus = a\ncorpus = b\n", "corpus\n", "corpus = a\nbeta = 0\n",
                           "corpus = a\nseed = -1\n", "corpus = a\nvectors.tfidf1 = x\n",
                           "corpus = a\noptics_min_samples = 1\n", "corpus = a\nworkers = two\n",
                           "corpus = a\nsingletons_to_unlabeled = maybe\n", "corpus = a\nbeta =\n"}) {
    EXPECT_THROW(parse_config(text), InputError) << text;
  }
  EXPECT_THROW(load_config("/nonexistent/run.conf"), InputError);
}

TEST(Config, ParseSizes) {
  const auto s = parse_sizes("250:5000:250");
  ASSERT_EQ(s.size(), 20u);
  EXPECT_EQ(s.front(), 250u);
  EXPECT_EQ(s.back(), 5000u);
  EXPECT_EQ(parse_sizes("100"), std::vector<std::size_t>{100});
  EXPECT_EQ(parse_sizes("3, 1,2"), (std::vector<std::size_t>{3, 1, 2}));
  for (const char* bad : {"", "0", "a", "1:2", "5:1:1", "1:5:0", "0:5:1", "1,,x", "1:2:3:4"})
    EXPECT_THROW(parse_sizes(bad), InputError) << bad;
}
