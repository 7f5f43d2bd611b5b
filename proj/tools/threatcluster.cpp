#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "threatcluster/threatcluster.hpp"

namespace fs = std::filesystem;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  unsigned workers = 0;
  double beta = 1.0;
  bool seed_set = false, workers_set = false, beta_set = false;
};

std::string fmt(double v, const char* spec = "%.2f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

int cmd_stats(const std::string& path) {
  const auto corpus = tc::load_jsonl(path);
  const auto s = tc::corpus_stats(corpus);
  auto opt = [](const auto& v) { return v ? fmt(static_cast<double>(*v)) : std::string("-"); };
  std::cout << "| corpus | size | mean | median | min | max | classes |\n"
            << "|---|---:|---:|---:|---:|---:|---:|\n"
            << "| " << fs::path(path).filename().string() << " | " << s.size << " | "
            << opt(s.mean_len) << " | " << opt(s.median_len) << " | "
            << (s.min_len ? std::to_string(*s.min_len) : "-") << " | "
            << (s.max_len ? std::to_string(*s.max_len) : "-") << " | " << s.n_classes << " |\n";
  return 0;
}

int cmd_embed(const std::string& corpus_path, const std::string& kind_name, const std::string& out,
              const std::string& stopwords, const Globals& g) {
  const auto kind = tc::parse_embedding_kind(kind_name);
  if (!kind) throw tc::InputError("unknown embedding kind \"" + kind_name + "\"");
  if (!tc::is_tfidf(*kind))
    throw tc::InputError(kind_name +
                         " vectors are produced by the embedder sidecar; "
                         "pass its output file via vectors." +
                         kind_name + " in the run config");
  const auto corpus = tc::load_jsonl(corpus_path);
  if (corpus.empty()) throw tc::InputError("corpus is empty");
  const tc::StopList stoplist =
      tc::resolve_stoplist(stopwords.empty() ? std::nullopt : std::optional<fs::path>(stopwords));
  std::vector<tc::TokenList> tokens;
  tokens.reserve(corpus.size());
  for (const auto& doc : corpus) tokens.push_back(tc::preprocess(doc, stoplist));
  const auto emb = tc::fit_transform(tokens, tc::tfidf_order(*kind), g.workers);
  tc::write_sparse(out, corpus, emb.matrix, emb.vocabulary);
  std::cout << kind_name << ": " << emb.matrix.rows() << " documents x " << emb.matrix.dim()
            << " dimensions, " << emb.matrix.nonzeros() << " non-zeros -> " << out << "\n";
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_override, const Globals& g) {
  auto cfg = tc::load_config(config_path);
  if (g.seed_set) cfg.seed = g.seed;
  if (g.workers_set) cfg.workers = g.workers;
  if (g.beta_set) cfg.beta = g.beta;
  if (!out_override.empty()) cfg.out_dir = out_override;
  tc::validate(cfg);
  const auto corpus = tc::load_jsonl(cfg.corpus);
  const auto results = tc::run_matrix(corpus, cfg);
  tc::write_reports(cfg.out_dir, corpus, results, cfg.threshold);

  std::size_t failed = 0;
  for (const auto& r : results)
    if (!r.row.ok()) {
      ++failed;
      std::cerr << "failed: " << tc::to_string(r.row.clusterer) << " " << tc::to_string(r.row.embedding)
                << " " << tc::to_string(r.row.metric) << ": " << r.row.error << "\n";
    }
  const auto shown = tc::report_rows(results, cfg.threshold);
  std::cout << tc::render_markdown(shown);
  std::cout << results.size() << " combinations, " << failed << " failed, " << shown.size()
            << " with V >= " << cfg.threshold << "; reports in " << cfg.out_dir.string() << "\n";
  return 0;
}

int cmd_bench(const std::string& corpus_path, const std::string& sizes,
              const std::vector<std::string>& clusterers, const std::string& out,
              const std::string& stopwords, const Globals& g) {
  tc::BenchmarkOptions opt;
  opt.sizes = tc::parse_sizes(sizes);
  opt.clusterers.clear();
  for (const auto& name : clusterers) {
    const auto k = tc::parse_clusterer(name);
    if (!k) throw tc::InputError("unknown clusterer \"" + name + "\"");
    opt.clusterers.push_back(*k);
  }
  opt.seed = g.seed;
  opt.beta = g.beta;
  opt.workers = g.workers;
  if (!stopwords.empty()) opt.stopwords = stopwords;
  opt.on_record = [](const tc::BenchmarkRecord& r) {
    std::cerr << "n=" << r.corpus_size << " " << tc::to_string(r.clusterer) << " T_e=" << fmt(r.t_embed, "%.3f")
              << " T_c=" << fmt(r.t_cluster, "%.3f") << " #C=" << r.n_clusters << "\n";
  };
  const auto corpus = tc::load_jsonl(corpus_path);
  const auto records = tc::scalability_benchmark(corpus, opt);
  const fs::path out_path(out);
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  tc::detail::write_text(out_path, tc::render_benchmark_csv(records));
  std::cout << records.size() << " records -> " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"threatcluster: cluster security text corpora and score the result"};
  app.require_subcommand(1);
  Globals g;
  auto* seed_opt = app.add_option("--seed", g.seed, "random seed (k-means init, resampling)");
  auto* workers_opt = app.add_option("--workers", g.workers, "worker threads, 0 = all cores");
  auto* beta_opt = app.add_option("--beta", g.beta, "V-measure weight")->check(CLI::PositiveNumber);

  std::string corpus, kind, out, config, sizes = "250:5000:250", stopwords;
  std::vector<std::string> clusterers{"kmeans", "optics"};

  auto* stats = app.add_subcommand("stats", "corpus statistics");
  stats->add_option("corpus", corpus, "JSONL corpus")->required();

  auto* embed = app.add_subcommand("embed", "write a TF-IDF matrix");
  embed->add_option("corpus", corpus, "JSONL corpus")->required();
  embed->add_option("--kind", kind, "tfidf1 | tfidf2 | tfidf3")->required();
  embed->add_option("--out", out, "output matrix path")->required();
  embed->add_option("--stopwords", stopwords, "stopword list file");

  auto* run = app.add_subcommand("run", "evaluate every configured combination");
  run->add_option("config", config, "key = value run config")->required();
  run->add_option("--out", out, "output directory (overrides out_dir)");

  auto* bench = app.add_subcommand("bench", "scalability benchmark on TF-IDF1 / cosine");
  bench->add_option("corpus", corpus, "JSONL corpus")->required();
  bench->add_option("--sizes", sizes, "start:stop:step or a,b,c");
  bench->add_option("--clusterers", clusterers, "kmeans dbscan optics")->delimiter(',');
  bench->add_option("--out", out, "benchmark CSV path")->required();
  bench->add_option("--stopwords", stopwords, "stopword list file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  g.seed_set = seed_opt->count() > 0;
  g.workers_set = workers_opt->count() > 0;
  g.beta_set = beta_opt->count() > 0;

  try {
    if (*stats) return cmd_stats(corpus);
    if (*embed) return cmd_embed(corpus, kind, out, stopwords, g);
    if (*run) return cmd_run(config, out, g);
    if (*bench) return cmd_bench(corpus, sizes, clusterers, out, stopwords, g);
  } catch (const tc::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
