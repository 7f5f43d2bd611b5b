#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "threatcluster/clustering.hpp"
#include "threatcluster/corpus.hpp"
#include "threatcluster/dbscan.hpp"
#include "threatcluster/dense_io.hpp"
#include "threatcluster/distance.hpp"
#include "threatcluster/embedding.hpp"
#include "threatcluster/error.hpp"
#include "threatcluster/kmeans.hpp"
#include "threatcluster/metrics.hpp"
#include "threatcluster/optics.hpp"
#include "threatcluster/parallel.hpp"
#include "threatcluster/preprocess.hpp"
#include "threatcluster/stopwords.hpp"
#include "threatcluster/tfidf.hpp"

namespace tc {

enum class ClustererKind { kmeans, dbscan, optics };

inline constexpr std::array<ClustererKind, 3> kAllClusterers{
    ClustererKind::kmeans, ClustererKind::dbscan, ClustererKind::optics};

inline constexpr std::string_view to_string(ClustererKind k) {
  switch (k) {
    case ClustererKind::kmeans: return "kmeans";
    case ClustererKind::dbscan: return "dbscan";
    case ClustererKind::optics: return "optics";
  }
  return "?";
}

inline constexpr std::string_view display_name(ClustererKind k) {
  switch (k) {
    case ClustererKind::kmeans: return "K-M.";
    case ClustererKind::dbscan: return "DBS";
    case ClustererKind::optics: return "OPT";
  }
  return "?";
}

inline std::optional<ClustererKind> parse_clusterer(std::string_view s) {
  for (auto k : kAllClusterers)
    if (to_string(k) == s) return k;
  return std::nullopt;
}

struct RunConfig {
  std::filesystem::path corpus;
  std::map<EmbeddingKind, std::filesystem::path> vectors;  // dense kinds only
  std::vector<EmbeddingKind> embeddings{kAllEmbeddings.begin(), kAllEmbeddings.end()};
  std::vector<Metric> metrics{kAllMetrics.begin(), kAllMetrics.end()};
  std::vector<ClustererKind> clusterers{kAllClusterers.begin(), kAllClusterers.end()};
  double beta = 1.0;
  std::uint64_t seed = 0;
  double threshold = 0.4;
  unsigned workers = 0;
  std::optional<std::filesystem::path> stopwords;
  bool singletons_to_unlabeled = true;
  std::size_t optics_min_samples = 2;
  std::filesystem::path out_dir = "out";
};

inline void validate(const RunConfig& cfg) {
  if (cfg.embeddings.empty()) throw InputError("config: no embeddings selected");
  if (cfg.metrics.empty()) throw InputError("config: no metrics selected");
  if (cfg.clusterers.empty()) throw InputError("config: no clusterers selected");
  if (!(cfg.threshold >= 0 && cfg.threshold <= 1))
    throw InputError("config: threshold must be within [0, 1], got " + std::to_string(cfg.threshold));
  if (!(cfg.beta > 0)) throw InputError("config: beta must be > 0");
  if (cfg.optics_min_samples < 2) throw InputError("config: optics min_samples must be >= 2");
}

struct EvalRow {
  std::size_t rank = 0;
  ClustererKind clusterer = ClustererKind::kmeans;
  EmbeddingKind embedding = EmbeddingKind::tfidf1;
  Metric metric = Metric::euclidean;
  double h = 0, c = 0, v = 0;
  std::size_t n_clusters = 0;  // noise counted as singletons
  double reduction_percent = 0;
  double t_embed = 0, t_cluster = 0;
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
  bool operator==(const EvalRow&) const = default;
};

struct CombinationResult {
  EvalRow row;
  Clustering clustering;  // raw, noise kept; empty on failure
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace detail

inline StopList resolve_stoplist(const std::optional<std::filesystem::path>& path) {
  return path ? load_stoplist(*path) : english_stopwords();
}

/// Native TF-IDF embedding including preprocessing.
inline EmbeddingMatrix embed_tfidf(const LabeledCorpus& corpus, EmbeddingKind kind,
                                   const StopList& stoplist, unsigned workers = 1) {
  if (!is_tfidf(kind)) throw std::invalid_argument("embed_tfidf: not a TF-IDF kind");
  std::vector<TokenList> tokens(corpus.size());
  parallel_for(corpus.size(), workers, [&](std::size_t i) { tokens[i] = preprocess(corpus[i], stoplist); });
  return fit_transform(tokens, tfidf_order(kind), workers).matrix;
}

/// TF-IDF kinds are computed; dense kinds are read from their vector file.
inline EmbeddingMatrix embed(const LabeledCorpus& corpus, EmbeddingKind kind, const RunConfig& cfg,
                             const StopList& stoplist, unsigned workers = 1) {
  if (is_tfidf(kind)) return embed_tfidf(corpus, kind, stoplist, workers);
  const auto it = cfg.vectors.find(kind);
  if (it == cfg.vectors.end())
    throw InputError("no vector file configured for " + std::string(to_string(kind)) +
                     " (set vectors." + std::string(to_string(kind)) + ")");
  EmbeddingMatrix m = read_vectors(it->second, corpus);
  if (m.kind() != kind)
    throw InputError(it->second.string() + ": file holds " + std::string(to_string(m.kind())) +
                     " vectors, expected " + std::string(to_string(kind)));
  return m;
}

/// Runs one clusterer with its fixed parameter policy: auto-k sweep for
/// k-means, supervised grid for DBSCAN, min_samples for OPTICS.
inline Clustering run_clusterer(ClustererKind kind, const EmbeddingMatrix& matrix,
                                const DistanceMatrix& dm, std::span<const std::string> truth,
                                const RunConfig& cfg, unsigned workers = 1) {
  switch (kind) {
    case ClustererKind::kmeans: return auto_kmeans(matrix, dm, cfg.seed, workers).clustering;
    case ClustererKind::dbscan: return dbscan_grid(dm, truth, cfg.beta, workers).best_clustering;
    case ClustererKind::optics: return optics(dm, cfg.optics_min_samples).clustering;
  }
  throw std::logic_error("unknown clusterer");
}

inline std::vector<std::string> scoring_truth(const LabeledCorpus& corpus, const RunConfig& cfg) {
  return truth_labels(cfg.singletons_to_unlabeled ? singletons_to_unlabeled(corpus) : corpus);
}

inline EvalRow evaluate(ClustererKind clusterer, EmbeddingKind embedding, Metric metric,
                        std::span<const std::string> truth, const Clustering& clustering,
                        double beta) {
  EvalRow row;
  row.clusterer = clusterer;
  row.embedding = embedding;
  row.metric = metric;
  const Clustering counted = noise_to_singletons(clustering);
  const ClusterScores s = score(truth, counted, beta);
  row.h = s.h;
  row.c = s.c;
  row.v = s.v;
  row.n_clusters = static_cast<std::size_t>(counted.n_clusters);
  row.reduction_percent = reduction(truth.size(), row.n_clusters);
  return row;
}

/// Stable sort by V descending (failures last) and 1-based ranks.
inline void rank_results(std::vector<CombinationResult>& results) {
  std::stable_sort(results.begin(), results.end(), [](const auto& a, const auto& b) {
    if (a.row.ok() != b.row.ok()) return a.row.ok();
    return a.row.v > b.row.v;
  });
  for (std::size_t i = 0; i < results.size(); ++i) results[i].row.rank = i + 1;
}

/// Rows shown in the human report: successful and V >= threshold.
inline std::vector<EvalRow> report_rows(std::span<const CombinationResult> results, double threshold) {
  std::vector<EvalRow> out;
  for (const auto& r : results)
    if (r.row.ok() && r.row.v >= threshold) out.push_back(r.row);
  return out;
}

inline std::vector<EvalRow> all_rows(std::span<const CombinationResult> results) {
  std::vector<EvalRow> out;
  for (const auto& r : results) out.push_back(r.row);
  return out;
}

/// Every configured (embedding, metric, clusterer) combination on `corpus`.
/// Each embedding is computed once; the pairwise matrix for an
/// (embedding, metric) pair is shared by its clusterers, and its build time
/// is charged to each of their T_c. Failures become rows carrying the error.
inline std::vector<CombinationResult> run_matrix(const LabeledCorpus& corpus, const RunConfig& cfg) {
  validate(cfg);
  if (corpus.empty()) throw InputError("corpus is empty");
  const unsigned workers = resolve_workers(cfg.workers);
  const StopList stoplist = resolve_stoplist(cfg.stopwords);
  const auto truth = scoring_truth(corpus, cfg);

  struct Embedded {
    EmbeddingMatrix matrix;
    double seconds = 0;
    std::string error;
  };
  std::vector<Embedded> embedded(cfg.embeddings.size());
  for (std::size_t e = 0; e < cfg.embeddings.size(); ++e) {
    const auto t0 = detail::Clock::now();
    try {
      embedded[e].matrix = embed(corpus, cfg.embeddings[e], cfg, stoplist, workers);
    } catch (const std::exception& ex) {
      embedded[e].error = ex.what();
    }
    embedded[e].seconds = detail::seconds_since(t0);
  }

  const std::size_t n_m = cfg.metrics.size(), n_c = cfg.clusterers.size();
  const std::size_t pairs = cfg.embeddings.size() * n_m;
  std::vector<CombinationResult> results(pairs * n_c);
  const unsigned inner = pairs > 1 && workers > 1 ? 1 : workers;

  parallel_for(pairs, workers, [&](std::size_t p) {
    const std::size_t e = p / n_m, m = p % n_m;
    const EmbeddingKind ek = cfg.embeddings[e];
    const Metric metric = cfg.metrics[m];
    auto fail = [&](std::size_t c, const std::string& msg) {
      EvalRow& row = results[p * n_c + c].row;
      row.clusterer = cfg.clusterers[c];
      row.embedding = ek;
      row.metric = metric;
      row.t_embed = embedded[e].seconds;
      row.error = msg;
    };
    if (!embedded[e].error.empty()) {
      for (std::size_t c = 0; c < n_c; ++c) fail(c, embedded[e].error);
      return;
    }
    const EmbeddingMatrix& matrix = embedded[e].matrix;
    DistanceMatrix dm;
    double t_dm = 0;
    try {
      const auto t0 = detail::Clock::now();
      dm = pairwise(matrix, metric, inner);
      t_dm = detail::seconds_since(t0);
    } catch (const std::exception& ex) {
      for (std::size_t c = 0; c < n_c; ++c) fail(c, ex.what());
      return;
    }
    for (std::size_t c = 0; c < n_c; ++c) {
      const ClustererKind ck = cfg.clusterers[c];
      try {
        const auto t0 = detail::Clock::now();
        Clustering clustering = run_clusterer(ck, matrix, dm, truth, cfg, inner);
        const double t_alg = detail::seconds_since(t0);
        EvalRow row = evaluate(ck, ek, metric, truth, clustering, cfg.beta);
        row.t_embed = embedded[e].seconds;
        row.t_cluster = t_dm + t_alg;
        results[p * n_c + c] = {std::move(row), std::move(clustering)};
      } catch (const std::exception& ex) {
        fail(c, ex.what());
      }
    }
  });

  rank_results(results);
  return results;
}

inline std::vector<CombinationResult> run_matrix(const RunConfig& cfg) {
  validate(cfg);
  return run_matrix(load_jsonl(cfg.corpus), cfg);
}

/// Single combination, embedding included. Unlike run_matrix, a failure
/// is thrown.
inline CombinationResult run_combination(const LabeledCorpus& corpus, EmbeddingKind embedding,
                                         Metric metric, ClustererKind clusterer, RunConfig cfg) {
  cfg.embeddings = {embedding};
  cfg.metrics = {metric};
  cfg.clusterers = {clusterer};
  auto results = run_matrix(corpus, cfg);
  if (!results.front().row.ok()) throw std::runtime_error(results.front().row.error);
  return std::move(results.front());
}

struct BenchmarkRecord {
  std::size_t corpus_size = 0;
  ClustererKind clusterer = ClustererKind::kmeans;
  double t_embed = 0, t_cluster = 0, t_sum = 0;
  std::size_t n_clusters = 0;  // noise counted as singletons
  Clustering clustering;
};

struct BenchmarkOptions {
  std::vector<std::size_t> sizes;
  std::vector<ClustererKind> clusterers{ClustererKind::kmeans, ClustererKind::optics};
  std::uint64_t seed = 0;
  double beta = 1.0;
  unsigned workers = 1;
  bool singletons_to_unlabeled = true;
  std::size_t optics_min_samples = 2;
  std::optional<std::filesystem::path> stopwords;
  std::function<void(const BenchmarkRecord&)> on_record;  // progress hook
};

/// For each size: resample the corpus, embed with TF-IDF1 (preprocessing
/// included in T_e), then per clusterer build the cosine matrix and cluster
/// (both in T_c). Records come out in size order, then clusterer order.
inline std::vector<BenchmarkRecord> scalability_benchmark(const LabeledCorpus& corpus,
                                                          const BenchmarkOptions& opt) {
  if (corpus.empty()) throw InputError("corpus is empty");
  const StopList stoplist = resolve_stoplist(opt.stopwords);
  RunConfig cfg;
  cfg.seed = opt.seed;
  cfg.beta = opt.beta;
  cfg.optics_min_samples = opt.optics_min_samples;

  std::vector<BenchmarkRecord> out;
  for (std::size_t size : opt.sizes) {
    if (size == 0) throw InputError("benchmark sizes must be >= 1");
    const LabeledCorpus sub = subsample(corpus, size, opt.seed);
    cfg.singletons_to_unlabeled = opt.singletons_to_unlabeled;
    const auto truth = scoring_truth(sub, cfg);

    const auto t0 = detail::Clock::now();
    const EmbeddingMatrix matrix = embed_tfidf(sub, EmbeddingKind::tfidf1, stoplist, opt.workers);
    const double t_embed = detail::seconds_since(t0);

    for (ClustererKind ck : opt.clusterers) {
      const auto t1 = detail::Clock::now();
      const DistanceMatrix dm = pairwise(matrix, Metric::cosine, opt.workers);
      Clustering clustering = run_clusterer(ck, matrix, dm, truth, cfg, opt.workers);
      const double t_cluster = detail::seconds_since(t1);
      BenchmarkRecord rec;
      rec.corpus_size = size;
      rec.clusterer = ck;
      rec.t_embed = t_embed;
      rec.t_cluster = t_cluster;
      rec.t_sum = t_embed + t_cluster;
      rec.n_clusters = static_cast<std::size_t>(noise_to_singletons(clustering).n_clusters);
      rec.clustering = std::move(clustering);
      if (opt.on_record) opt.on_record(rec);
      out.push_back(std::move(rec));
    }
  }
  return out;
}

}  // namespace tc
