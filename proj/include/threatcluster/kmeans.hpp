#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "threatcluster/clustering.hpp"
#include "threatcluster/distance.hpp"
#include "threatcluster/embedding.hpp"
#include "threatcluster/parallel.hpp"

namespace tc {

enum class KMeansInit {
  plus_plus,  // D^2-weighted seeding under the clustering metric
  random,     // k distinct points drawn uniformly
};

struct KMeansParams {
  std::size_t k = 2;
  std::uint64_t seed = 0;
  std::size_t max_iters = 300;
  KMeansInit init = KMeansInit::plus_plus;
};

struct KMeansResult {
  Clustering clustering;
  std::size_t iterations = 0;
  double inertia = 0;  // sum of metric distances to the assigned centroid
};

namespace detail {

// Dense centroids with cached norms, and metric distance from a row.
class Centroids {
 public:
  Centroids(std::size_t k, std::size_t dim, Metric metric)
      : k_(k), dim_(dim), metric_(metric), values_(k * dim, 0.0), sq_(k, 0.0), abs_(k, 0.0) {}

  std::span<double> operator[](std::size_t c) { return std::span(values_).subspan(c * dim_, dim_); }
  std::span<const double> operator[](std::size_t c) const {
    return std::span(values_).subspan(c * dim_, dim_);
  }

  void set_from_row(std::size_t c, const RowView& row) {
    auto dst = (*this)[c];
    std::fill(dst.begin(), dst.end(), 0.0);
    row.for_each([&](std::uint32_t j, double v) { dst[j] = v; });
    refresh(c);
  }

  void refresh(std::size_t c) {
    double sq = 0, ab = 0;
    for (double v : (*this)[c]) {
      sq += v * v;
      ab += std::abs(v);
    }
    sq_[c] = sq;
    abs_[c] = ab;
  }

  // O(nnz(row)) for every metric: the centroid contributions of columns
  // absent from the row come from the cached norms.
  double distance(const RowView& row, double row_sq, std::size_t c) const {
    const auto cen = (*this)[c];
    switch (metric_) {
      case Metric::euclidean: {
        double s = sq_[c];
        row.for_each([&](std::uint32_t j, double x) {
          s += (x - cen[j]) * (x - cen[j]) - cen[j] * cen[j];
        });
        return std::sqrt(std::max(0.0, s));
      }
      case Metric::manhattan: {
        double s = abs_[c];
        row.for_each([&](std::uint32_t j, double x) {
          s += std::abs(x - cen[j]) - std::abs(cen[j]);
        });
        return std::max(0.0, s);
      }
      case Metric::cosine: {
        double dot = 0;
        row.for_each([&](std::uint32_t j, double x) { dot += x * cen[j]; });
        return cosine_from_parts(dot, row_sq, sq_[c]);
      }
    }
    return 0.0;
  }

  std::size_t k() const { return k_; }

 private:
  std::size_t k_, dim_;
  Metric metric_;
  std::vector<double> values_;
  std::vector<double> sq_, abs_;
};

inline double row_sq_norm(const RowView& row) {
  double s = 0;
  row.for_each([&](std::uint32_t, double v) { s += v * v; });
  return s;
}

}  // namespace detail

/// Lloyd iteration under `metric`. Centroids are member means; for cosine
/// the rows are L2-normalized first and centroids re-normalized after each
/// update (spherical k-means). Stops when assignments repeat or after
/// max_iters. An emptied cluster is reseeded with the point farthest from
/// its current centroid. Nearest-centroid ties go to the lower index.
inline KMeansResult kmeans(const EmbeddingMatrix& input, Metric metric, const KMeansParams& params) {
  const std::size_t n = input.rows();
  const std::size_t k = params.k;
  if (k == 0) throw std::invalid_argument("kmeans: k must be >= 1");
  if (k > n)
    throw std::invalid_argument("kmeans: k = " + std::to_string(k) + " exceeds n = " +
                                std::to_string(n));

  const EmbeddingMatrix normalized =
      metric == Metric::cosine ? input.l2_normalized() : EmbeddingMatrix{};
  const EmbeddingMatrix& data = metric == Metric::cosine ? normalized : input;

  std::vector<double> row_sq(n);
  for (std::size_t i = 0; i < n; ++i) row_sq[i] = detail::row_sq_norm(data.row(i));

  detail::Centroids centroids(k, data.dim(), metric);
  std::mt19937_64 rng(params.seed);

  // Seeding.
  std::vector<std::size_t> seeds;
  seeds.reserve(k);
  if (params.init == KMeansInit::random) {
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t c = 0; c < k; ++c) {
      std::uniform_int_distribution<std::size_t> pick(c, n - 1);
      std::swap(pool[c], pool[pick(rng)]);
      seeds.push_back(pool[c]);
    }
  } else {
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    std::vector<char> chosen(n, 0);
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    seeds.push_back(first(rng));
    while (true) {
      const std::size_t c = seeds.size() - 1;
      chosen[seeds.back()] = 1;
      centroids.set_from_row(c, data.row(seeds.back()));
      if (seeds.size() == k) break;
      double total = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (chosen[i]) {
          nearest[i] = 0;
          continue;
        }
        const double d = centroids.distance(data.row(i), row_sq[i], c);
        nearest[i] = std::min(nearest[i], d * d);
        total += nearest[i];
      }
      std::size_t next = n;
      if (total > 0) {
        double target = std::uniform_real_distribution<double>(0.0, total)(rng);
        for (std::size_t i = 0; i < n; ++i) {
          if (chosen[i] || nearest[i] == 0) continue;
          next = i;
          if (target < nearest[i]) break;
          target -= nearest[i];
        }
      } else {
        // Every remaining point coincides with a seed: pick uniformly.
        std::vector<std::size_t> rest;
        for (std::size_t i = 0; i < n; ++i)
          if (!chosen[i]) rest.push_back(i);
        next = rest[std::uniform_int_distribution<std::size_t>(0, rest.size() - 1)(rng)];
      }
      seeds.push_back(next);
    }
  }
  if (params.init == KMeansInit::random)
    for (std::size_t c = 0; c < k; ++c) centroids.set_from_row(c, data.row(seeds[c]));

  std::vector<int> assign(n, -1), next_assign(n);
  std::vector<double> dist_to_own(n);
  KMeansResult result;
  for (std::size_t iter = 0; iter < std::max<std::size_t>(params.max_iters, 1); ++iter) {
    result.iterations = iter + 1;
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const RowView row = data.row(i);
      double best = std::numeric_limits<double>::infinity();
      int best_c = 0;
      for (std::size_t c = 0; c < k; ++c) {
        const double d = centroids.distance(row, row_sq[i], c);
        if (d < best) {
          best = d;
          best_c = static_cast<int>(c);
        }
      }
      next_assign[i] = best_c;
      dist_to_own[i] = best;
      ++sizes[static_cast<std::size_t>(best_c)];
    }

    // Empty-cluster repair: move the worst-fitting point of a cluster with
    // more than one member into each empty cluster.
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] != 0) continue;
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[static_cast<std::size_t>(next_assign[i])] < 2) continue;
        if (far == n || dist_to_own[i] > dist_to_own[far]) far = i;
      }
      if (far == n) break;
      --sizes[static_cast<std::size_t>(next_assign[far])];
      next_assign[far] = static_cast<int>(c);
      dist_to_own[far] = 0;
      ++sizes[c];
    }

    const bool stable = next_assign == assign;
    assign.swap(next_assign);
    if (stable) break;

    // Centroid update.
    std::vector<double> sums(k * data.dim(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = static_cast<std::size_t>(assign[i]);
      data.row(i).for_each([&](std::uint32_t j, double v) { sums[c * data.dim() + j] += v; });
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] == 0) continue;
      auto cen = centroids[c];
      for (std::size_t j = 0; j < data.dim(); ++j)
        cen[j] = sums[c * data.dim() + j] / static_cast<double>(sizes[c]);
      if (metric == Metric::cosine) {
        double sq = 0;
        for (double v : cen) sq += v * v;
        if (sq > 0) {
          const double norm = std::sqrt(sq);
          for (double& v : cen) v /= norm;
        }
      }
      centroids.refresh(c);
    }
  }

  result.inertia = 0;
  for (std::size_t i = 0; i < n; ++i)
    result.inertia += centroids.distance(data.row(i), row_sq[i], static_cast<std::size_t>(assign[i]));
  result.clustering = make_clustering(assign);
  return result;
}

/// Mean silhouette over all points. A point alone in its cluster scores 0;
/// a point with a = b = 0 scores 0.
inline double silhouette(const DistanceMatrix& dm, const Clustering& clustering) {
  const std::size_t n = dm.size();
  if (clustering.size() != n) throw std::invalid_argument("silhouette: size mismatch");
  if (clustering.has_noise()) throw std::invalid_argument("silhouette: clustering contains noise");
  if (clustering.n_clusters < 2)
    throw std::invalid_argument("silhouette: undefined for fewer than 2 clusters");
  const auto sizes = cluster_sizes(clustering);
  for (auto s : sizes)
    if (s == 0) throw std::invalid_argument("silhouette: empty cluster");

  const std::size_t k = sizes.size();
  double total = 0;
  std::vector<double> sums(k);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(sums.begin(), sums.end(), 0.0);
    const auto row = dm.row(i);
    for (std::size_t j = 0; j < n; ++j) sums[static_cast<std::size_t>(clustering.assignment[j])] += row[j];
    const auto own = static_cast<std::size_t>(clustering.assignment[i]);
    if (sizes[own] == 1) continue;
    const double a = sums[own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c)
      if (c != own) b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
    const double m = std::max(a, b);
    if (m > 0) total += (b - a) / m;
  }
  return total / static_cast<double>(n);
}

struct AutoKMeansResult {
  Clustering clustering;
  std::size_t k = 0;
  double silhouette = 0;
  std::vector<double> sweep;  // silhouette per k, starting at k = 2; NaN if undefined
};

/// Runs k-means for every k in [2, floor(sqrt(n))] and keeps the clustering
/// with the highest silhouette on `dm`; ties keep the smaller k.
inline AutoKMeansResult auto_kmeans(const EmbeddingMatrix& matrix, const DistanceMatrix& dm,
                                    std::uint64_t seed, unsigned workers = 1,
                                    std::size_t max_iters = 300,
                                    KMeansInit init = KMeansInit::plus_plus) {
  const std::size_t n = matrix.rows();
  if (n < 4) throw std::invalid_argument("auto_kmeans: needs at least 4 points, got " + std::to_string(n));
  if (dm.size() != n) throw std::invalid_argument("auto_kmeans: distance matrix size mismatch");
  const auto k_max = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  const std::size_t count = k_max - 1;

  std::vector<Clustering> results(count);
  std::vector<double> scores(count, std::numeric_limits<double>::quiet_NaN());
  parallel_for(count, workers, [&](std::size_t idx) {
    KMeansParams p{idx + 2, seed, max_iters, init};
    results[idx] = kmeans(matrix, dm.metric(), p).clustering;
    if (results[idx].n_clusters >= 2) scores[idx] = silhouette(dm, results[idx]);
  });

  std::size_t best = 0;
  bool found = false;
  for (std::size_t idx = 0; idx < count; ++idx) {
    if (std::isnan(scores[idx])) continue;
    if (!found || scores[idx] > scores[best]) {
      best = idx;
      found = true;
    }
  }
  AutoKMeansResult out;
  out.k = best + 2;
  out.clustering = std::move(results[best]);
  out.silhouette = found ? scores[best] : std::numeric_limits<double>::quiet_NaN();
  out.sweep = std::move(scores);
  return out;
}

inline AutoKMeansResult auto_kmeans(const EmbeddingMatrix& matrix, Metric metric,
                                    std::uint64_t seed, unsigned workers = 1) {
  return auto_kmeans(matrix, pairwise(matrix, metric, workers), seed, workers);
}

}  // namespace tc
