#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tc {

enum class EmbeddingKind { tfidf1, tfidf2, tfidf3, doc2vec, sbert_h, sbert_t, sbert_ht };

inline constexpr std::array<EmbeddingKind, 7> kAllEmbeddings{
    EmbeddingKind::tfidf1,  EmbeddingKind::tfidf2,  EmbeddingKind::tfidf3,
    EmbeddingKind::doc2vec, EmbeddingKind::sbert_h, EmbeddingKind::sbert_t,
    EmbeddingKind::sbert_ht};

inline constexpr std::string_view to_string(EmbeddingKind kind) {
  switch (kind) {
    case EmbeddingKind::tfidf1: return "tfidf1";
    case EmbeddingKind::tfidf2: return "tfidf2";
    case EmbeddingKind::tfidf3: return "tfidf3";
    case EmbeddingKind::doc2vec: return "doc2vec";
    case EmbeddingKind::sbert_h: return "sbert_h";
    case EmbeddingKind::sbert_t: return "sbert_t";
    case EmbeddingKind::sbert_ht: return "sbert_ht";
  }
  return "?";
}

/// Table-style label used in human reports.
inline constexpr std::string_view display_name(EmbeddingKind kind) {
  switch (kind) {
    case EmbeddingKind::tfidf1: return "TF-IDF1";
    case EmbeddingKind::tfidf2: return "TF-IDF2";
    case EmbeddingKind::tfidf3: return "TF-IDF3";
    case EmbeddingKind::doc2vec: return "doc2vec";
    case EmbeddingKind::sbert_h: return "SBERT_H";
    case EmbeddingKind::sbert_t: return "SBERT_T";
    case EmbeddingKind::sbert_ht: return "SBERT_HT";
  }
  return "?";
}

inline std::optional<EmbeddingKind> parse_embedding_kind(std::string_view s) {
  for (auto kind : kAllEmbeddings)
    if (to_string(kind) == s) return kind;
  return std::nullopt;
}

inline constexpr bool is_tfidf(EmbeddingKind kind) {
  return kind == EmbeddingKind::tfidf1 || kind == EmbeddingKind::tfidf2 ||
         kind == EmbeddingKind::tfidf3;
}

inline constexpr int tfidf_order(EmbeddingKind kind) {
  return kind == EmbeddingKind::tfidf1 ? 1 : kind == EmbeddingKind::tfidf2 ? 2 : 3;
}

/// Non-zero entries of one row: column indices ascending, values aligned.
/// Dense rows expose every column.
struct RowView {
  std::span<const std::uint32_t> indices;  // unused for dense rows
  std::span<const double> values;
  bool dense = false;

  template <class Fn>
  void for_each(Fn&& fn) const {
    if (dense) {
      for (std::size_t j = 0; j < values.size(); ++j) fn(static_cast<std::uint32_t>(j), values[j]);
    } else {
      for (std::size_t k = 0; k < indices.size(); ++k) fn(indices[k], values[k]);
    }
  }
};

/// Row-per-document vectors in corpus order, either all sparse (CSR) or
/// all dense (row-major). Values are finite.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;

  static EmbeddingMatrix sparse(EmbeddingKind kind, std::size_t dim,
                                std::vector<std::size_t> indptr,
                                std::vector<std::uint32_t> indices,
                                std::vector<double> values) {
    if (indptr.empty() || indptr.front() != 0 || indptr.back() != indices.size() ||
        indices.size() != values.size())
      throw std::invalid_argument("inconsistent CSR arrays");
    EmbeddingMatrix m;
    m.kind_ = kind;
    m.dim_ = dim;
    m.rows_ = indptr.size() - 1;
    m.sparse_ = true;
    for (std::size_t r = 0; r < m.rows_; ++r) {
      if (indptr[r] > indptr[r + 1]) throw std::invalid_argument("CSR indptr not monotone");
      for (std::size_t k = indptr[r]; k < indptr[r + 1]; ++k) {
        if (indices[k] >= dim) throw std::invalid_argument("column index out of range");
        if (k > indptr[r] && indices[k] <= indices[k - 1])
          throw std::invalid_argument("CSR columns must be strictly increasing");
      }
    }
    check_finite(values);
    m.indptr_ = std::move(indptr);
    m.indices_ = std::move(indices);
    m.values_ = std::move(values);
    return m;
  }

  static EmbeddingMatrix dense(EmbeddingKind kind, std::size_t rows,
                               std::size_t dim, std::vector<double> values) {
    if (values.size() != rows * dim)
      throw std::invalid_argument("dense matrix size mismatch");
    check_finite(values);
    EmbeddingMatrix m;
    m.kind_ = kind;
    m.dim_ = dim;
    m.rows_ = rows;
    m.sparse_ = false;
    m.values_ = std::move(values);
    return m;
  }

  EmbeddingKind kind() const { return kind_; }
  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }
  bool is_sparse() const { return sparse_; }
  std::size_t nonzeros() const { return sparse_ ? indices_.size() : values_.size(); }

  RowView row(std::size_t r) const {
    if (sparse_) {
      const auto b = indptr_[r], e = indptr_[r + 1];
      return {std::span(indices_).subspan(b, e - b), std::span(values_).subspan(b, e - b), false};
    }
    return {{}, std::span(values_).subspan(r * dim_, dim_), true};
  }

  /// Dense view of row r; only valid for dense matrices.
  std::span<const double> dense_row(std::size_t r) const {
    if (sparse_) throw std::logic_error("dense_row on a sparse matrix");
    return std::span(values_).subspan(r * dim_, dim_);
  }

  /// Copy of row r with every column materialized.
  std::vector<double> to_dense_row(std::size_t r) const {
    std::vector<double> out(dim_, 0.0);
    row(r).for_each([&](std::uint32_t j, double v) { out[j] = v; });
    return out;
  }

  /// Same structure with every value multiplied by `factor`.
  EmbeddingMatrix scaled(double factor) const {
    EmbeddingMatrix m = *this;
    for (auto& v : m.values_) v *= factor;
    check_finite(m.values_);
    return m;
  }

  /// Same structure with every non-zero row scaled to unit L2 norm.
  EmbeddingMatrix l2_normalized() const {
    EmbeddingMatrix m = *this;
    for (std::size_t r = 0; r < rows_; ++r) {
      const auto [b, e] = m.row_range(r);
      double sq = 0;
      for (std::size_t k = b; k < e; ++k) sq += m.values_[k] * m.values_[k];
      if (sq == 0) continue;
      const double norm = std::sqrt(sq);
      for (std::size_t k = b; k < e; ++k) m.values_[k] /= norm;
    }
    return m;
  }

  bool operator==(const EmbeddingMatrix&) const = default;

 private:
  std::pair<std::size_t, std::size_t> row_range(std::size_t r) const {
    if (sparse_) return {indptr_[r], indptr_[r + 1]};
    return {r * dim_, (r + 1) * dim_};
  }

  static void check_finite(const std::vector<double>& values) {
    for (double v : values)
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite embedding value");
  }

  EmbeddingKind kind_ = EmbeddingKind::tfidf1;
  std::size_t dim_ = 0;
  std::size_t rows_ = 0;
  bool sparse_ = true;
  std::vector<std::size_t> indptr_{0};
  std::vector<std::uint32_t> indices_;
  std::vector<double> values_;
};

}  // namespace tc
