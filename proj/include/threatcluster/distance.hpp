#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "threatcluster/embedding.hpp"
#include "threatcluster/parallel.hpp"

namespace tc {

enum class Metric { euclidean, cosine, manhattan };

inline constexpr std::array<Metric, 3> kAllMetrics{Metric::euclidean, Metric::cosine,
                                                   Metric::manhattan};

inline constexpr std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::euclidean: return "euclidean";
    case Metric::cosine: return "cosine";
    case Metric::manhattan: return "manhattan";
  }
  return "?";
}

inline constexpr std::string_view display_name(Metric m) {
  switch (m) {
    case Metric::euclidean: return "euc.";
    case Metric::cosine: return "cos.";
    case Metric::manhattan: return "man.";
  }
  return "?";
}

inline std::optional<Metric> parse_metric(std::string_view s) {
  for (auto m : kAllMetrics)
    if (to_string(m) == s) return m;
  return std::nullopt;
}

namespace detail {

// Cosine distance from a dot product and the two squared norms. A zero
// vector is at distance 1 from everything except another zero vector.
// sqrt(a * b) instead of sqrt(a) * sqrt(b) so identical rows give exactly 0.
inline double cosine_from_parts(double dot, double sq_u, double sq_v) {
  if (sq_u == 0 && sq_v == 0) return 0.0;
  if (sq_u == 0 || sq_v == 0) return 1.0;
  return std::clamp(1.0 - dot / std::sqrt(sq_u * sq_v), 0.0, 2.0);
}

}  // namespace detail

inline double distance(std::span<const double> u, std::span<const double> v, Metric metric) {
  if (u.size() != v.size()) throw std::invalid_argument("distance: dimension mismatch");
  switch (metric) {
    case Metric::euclidean: {
      double s = 0;
      for (std::size_t i = 0; i < u.size(); ++i) s += (u[i] - v[i]) * (u[i] - v[i]);
      return std::sqrt(s);
    }
    case Metric::manhattan: {
      double s = 0;
      for (std::size_t i = 0; i < u.size(); ++i) s += std::abs(u[i] - v[i]);
      return s;
    }
    case Metric::cosine: {
      double dot = 0, su = 0, sv = 0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        su += u[i] * u[i];
        sv += v[i] * v[i];
      }
      return detail::cosine_from_parts(dot, su, sv);
    }
  }
  return 0.0;
}

/// Distance between two rows of the same matrix. Sparse rows are merged by
/// column without densifying.
inline double row_distance(const RowView& a, const RowView& b, Metric metric) {
  if (a.dense || b.dense) {
    if (!(a.dense && b.dense)) throw std::invalid_argument("row_distance: mixed storage");
    return distance(a.values, b.values, metric);
  }
  double dot = 0, sq_a = 0, sq_b = 0, sum_sq = 0, sum_abs = 0;
  std::size_t i = 0, j = 0;
  const auto na = a.indices.size(), nb = b.indices.size();
  while (i < na || j < nb) {
    double x = 0, y = 0;
    if (j >= nb || (i < na && a.indices[i] < b.indices[j])) {
      x = a.values[i++];
    } else if (i >= na || b.indices[j] < a.indices[i]) {
      y = b.values[j++];
    } else {
      x = a.values[i++];
      y = b.values[j++];
    }
    dot += x * y;
    sq_a += x * x;
    sq_b += y * y;
    sum_sq += (x - y) * (x - y);
    sum_abs += std::abs(x - y);
  }
  switch (metric) {
    case Metric::euclidean: return std::sqrt(sum_sq);
    case Metric::manhattan: return sum_abs;
    case Metric::cosine: return detail::cosine_from_parts(dot, sq_a, sq_b);
  }
  return 0.0;
}

/// Symmetric n x n matrix of pairwise distances, materialized row-major.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::size_t n, Metric metric) : n_(n), metric_(metric), values_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  Metric metric() const { return metric_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return std::span(values_).subspan(i * n_, n_);
  }

  void set(std::size_t i, std::size_t j, double d) {
    values_[i * n_ + j] = d;
    values_[j * n_ + i] = d;
  }

  bool operator==(const DistanceMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  Metric metric_ = Metric::euclidean;
  std::vector<double> values_;
};

/// All pairwise distances. Each entry depends only on its two rows, so the
/// result is identical for any worker count.
inline DistanceMatrix pairwise(const EmbeddingMatrix& matrix, Metric metric,
                               unsigned workers = 1) {
  const std::size_t n = matrix.rows();
  DistanceMatrix dm(n, metric);
  parallel_for(n, workers, [&](std::size_t i) {
    const RowView ri = matrix.row(i);
    for (std::size_t j = i + 1; j < n; ++j) dm.set(i, j, row_distance(ri, matrix.row(j), metric));
  });
  return dm;
}

}  // namespace tc
