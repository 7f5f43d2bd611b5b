#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "threatcluster/embedding.hpp"
#include "threatcluster/parallel.hpp"
#include "threatcluster/preprocess.hpp"

namespace tc {

/// Term dictionary fitted on one corpus. Columns follow lexicographic term
/// order so two fits on the same data agree exactly.
struct Vocabulary {
  std::vector<std::string> terms;
  std::vector<std::size_t> document_frequency;
  std::unordered_map<std::string, std::uint32_t> index;
  std::size_t n_docs_fitted = 0;
  int ngram_max = 1;

  std::size_t size() const { return terms.size(); }

  /// Smoothed inverse document frequency: ln((1 + n) / (1 + df)) + 1.
  double idf(std::uint32_t column) const {
    return std::log((1.0 + static_cast<double>(n_docs_fitted)) /
                    (1.0 + static_cast<double>(document_frequency[column]))) +
           1.0;
  }
};

inline Vocabulary fit_vocabulary(std::span<const TokenList> docs, int ngram_max) {
  if (docs.empty()) throw std::invalid_argument("cannot fit a vocabulary on an empty corpus");
  std::map<std::string, std::size_t> df;
  for (const auto& tokens : docs) {
    auto terms = ngrams(tokens, ngram_max);
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    for (auto& t : terms) ++df[std::move(t)];
  }

  Vocabulary vocab;
  vocab.n_docs_fitted = docs.size();
  vocab.ngram_max = ngram_max;
  vocab.terms.reserve(df.size());
  vocab.document_frequency.reserve(df.size());
  vocab.index.reserve(df.size());
  for (auto& [term, count] : df) {
    vocab.index.emplace(term, static_cast<std::uint32_t>(vocab.terms.size()));
    vocab.terms.push_back(term);
    vocab.document_frequency.push_back(count);
  }
  return vocab;
}

/// Raw term counts times idf, then each non-zero row scaled to unit L2 norm.
/// Terms missing from the vocabulary are ignored.
inline EmbeddingMatrix transform(std::span<const TokenList> docs, const Vocabulary& vocab,
                                 unsigned workers = 1) {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(docs.size());
  parallel_for(docs.size(), workers, [&](std::size_t d) {
    std::unordered_map<std::uint32_t, double> counts;
    for (const auto& term : ngrams(docs[d], vocab.ngram_max))
      if (auto it = vocab.index.find(term); it != vocab.index.end()) counts[it->second] += 1.0;

    auto& row = rows[d];
    row.assign(counts.begin(), counts.end());
    std::sort(row.begin(), row.end());
    double sq = 0;
    for (auto& [col, w] : row) {
      w *= vocab.idf(col);
      sq += w * w;
    }
    if (sq > 0) {
      const double norm = std::sqrt(sq);
      for (auto& entry : row) entry.second /= norm;
    }
  });

  std::vector<std::size_t> indptr{0};
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
  for (const auto& row : rows) {
    for (const auto& [col, w] : row) {
      indices.push_back(col);
      values.push_back(w);
    }
    indptr.push_back(indices.size());
  }
  const auto kind = vocab.ngram_max == 1   ? EmbeddingKind::tfidf1
                    : vocab.ngram_max == 2 ? EmbeddingKind::tfidf2
                                           : EmbeddingKind::tfidf3;
  return EmbeddingMatrix::sparse(kind, vocab.size(), std::move(indptr), std::move(indices),
                                 std::move(values));
}

struct TfidfEmbedding {
  Vocabulary vocabulary;
  EmbeddingMatrix matrix;
};

/// Refits the vocabulary on `docs` and transforms them; every new corpus
/// gets its own dictionary so unseen identifiers become columns.
inline TfidfEmbedding fit_transform(std::span<const TokenList> docs, int ngram_max,
                                    unsigned workers = 1) {
  TfidfEmbedding out{fit_vocabulary(docs, ngram_max), {}};
  out.matrix = transform(docs, out.vocabulary, workers);
  return out;
}

}  // namespace tc
