#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "threatcluster/clustering.hpp"
#include "threatcluster/distance.hpp"
#include "threatcluster/metrics.hpp"
#include "threatcluster/parallel.hpp"

namespace tc {

struct DbscanParams {
  double eps = 0.5;
  std::size_t min_samples = 5;

  bool operator==(const DbscanParams&) const = default;
};

inline void validate(const DbscanParams& p) {
  if (!(p.eps > 0) || !std::isfinite(p.eps)) throw std::invalid_argument("dbscan: eps must be > 0");
  if (p.min_samples < 1) throw std::invalid_argument("dbscan: min_samples must be >= 1");
}

/// DBSCAN on a precomputed matrix. Neighbourhoods are closed (d <= eps) and
/// include the point itself. Clusters are the eps-connected components of
/// core points. A border point joins the cluster of its nearest core
/// neighbour, lowest index on equal distance.
inline Clustering dbscan(const DistanceMatrix& dm, const DbscanParams& params) {
  validate(params);
  const std::size_t n = dm.size();
  std::vector<char> core(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = dm.row(i);
    std::size_t count = 0;
    for (std::size_t j = 0; j < n && count < params.min_samples; ++j)
      if (row[j] <= params.eps) ++count;
    core[i] = count >= params.min_samples;
  }

  std::vector<int> label(n, kNoise);
  int next = 0;
  std::deque<std::size_t> queue;
  for (std::size_t s = 0; s < n; ++s) {
    if (!core[s] || label[s] != kNoise) continue;
    label[s] = next;
    queue.push_back(s);
    while (!queue.empty()) {
      const std::size_t p = queue.front();
      queue.pop_front();
      const auto row = dm.row(p);
      for (std::size_t q = 0; q < n; ++q) {
        if (!core[q] || label[q] != kNoise || row[q] > params.eps) continue;
        label[q] = next;
        queue.push_back(q);
      }
    }
    ++next;
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) continue;
    const auto row = dm.row(i);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (!core[j] || row[j] > params.eps) continue;
      if (row[j] < best) {
        best = row[j];
        label[i] = label[j];
      }
    }
  }
  return make_clustering(label);
}

/// eps = 0.1, 0.2, ..., 3.0
inline std::vector<double> default_eps_range() {
  std::vector<double> out;
  for (int k = 1; k <= 30; ++k) out.push_back(k / 10.0);
  return out;
}

/// min_samples = 1 .. floor(sqrt(n)), at least {1}.
inline std::vector<std::size_t> default_min_samples_range(std::size_t n) {
  const auto top = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(n))));
  std::vector<std::size_t> out(top);
  std::iota(out.begin(), out.end(), std::size_t{1});
  return out;
}

struct GridSearchResult {
  DbscanParams best_params;
  Clustering best_clustering;  // raw, noise kept
  ClusterScores best_scores;
  double best_v = 0;
  std::size_t grid_size = 0;
};

namespace detail {

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;
  }
};

// Per row: other indices ordered by (distance, index), with the distances.
struct SortedNeighbours {
  std::size_t n = 0;
  std::vector<std::uint32_t> index;
  std::vector<double> dist;

  explicit SortedNeighbours(const DistanceMatrix& dm, unsigned workers) : n(dm.size()) {
    index.resize(n * n);
    dist.resize(n * n);
    parallel_for(n, workers, [&](std::size_t i) {
      auto idx = std::span(index).subspan(i * n, n);
      std::iota(idx.begin(), idx.end(), 0u);
      const auto row = dm.row(i);
      std::stable_sort(idx.begin(), idx.end(),
                       [&](std::uint32_t a, std::uint32_t b) { return row[a] < row[b]; });
      for (std::size_t k = 0; k < n; ++k) dist[i * n + k] = row[idx[k]];
    });
  }

  // Number of neighbours with d <= eps (self included).
  std::size_t count_within(std::size_t i, double eps) const {
    const auto b = dist.begin() + static_cast<std::ptrdiff_t>(i * n);
    return static_cast<std::size_t>(std::upper_bound(b, b + static_cast<std::ptrdiff_t>(n), eps) - b);
  }
};

}  // namespace detail

/// Supervised DBSCAN parameter search: every (eps, min_samples) cell is
/// clustered, noise is split into singletons, and V_beta against the truth
/// picks the winner. Ties keep the smaller eps, then the smaller
/// min_samples. Cells are evaluated from one shared neighbour ordering with
/// union-find rather than by calling dbscan() per cell.
inline GridSearchResult dbscan_grid(const DistanceMatrix& dm, std::span<const std::string> truth,
                                    std::span<const double> eps_range,
                                    std::span<const std::size_t> ms_range, double beta = 1.0,
                                    unsigned workers = 1) {
  const std::size_t n = dm.size();
  if (truth.size() != n)
    throw std::invalid_argument("dbscan_grid: " + std::to_string(truth.size()) + " labels for " +
                                std::to_string(n) + " points");
  if (eps_range.empty() || ms_range.empty())
    throw std::invalid_argument("dbscan_grid: empty parameter range");
  for (double e : eps_range) validate({e, 1});
  for (auto m : ms_range) validate({1.0, m});
  if (n == 0) throw std::invalid_argument("dbscan_grid: empty distance matrix");

  const auto enc = encode_labels(truth);
  const detail::SortedNeighbours nb(dm, workers);

  const std::size_t n_ms = ms_range.size();
  std::vector<double> cell_v(eps_range.size() * n_ms, -1.0);

  auto cluster_cell = [&](std::size_t ms, const std::vector<std::size_t>& counts) {
    std::vector<char> core(n);
    for (std::size_t i = 0; i < n; ++i) core[i] = counts[i] >= ms;
    detail::DisjointSets sets(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!core[i]) continue;
      for (std::size_t k = 0; k < counts[i]; ++k) {
        const std::size_t j = nb.index[i * n + k];
        if (j > i && core[j]) sets.unite(i, j);
      }
    }
    std::vector<int> raw(n, kNoise);
    for (std::size_t i = 0; i < n; ++i) {
      if (core[i]) {
        raw[i] = static_cast<int>(sets.find(i));
        continue;
      }
      for (std::size_t k = 0; k < counts[i]; ++k) {
        const std::size_t j = nb.index[i * n + k];
        if (core[j]) {
          raw[i] = static_cast<int>(sets.find(j));
          break;
        }
      }
    }
    return make_clustering(raw);
  };

  auto counts_for = [&](double eps) {
    std::vector<std::size_t> counts(n);
    for (std::size_t i = 0; i < n; ++i) counts[i] = nb.count_within(i, eps);
    return counts;
  };

  parallel_for(eps_range.size(), workers, [&](std::size_t e) {
    const auto counts = counts_for(eps_range[e]);
    for (std::size_t m = 0; m < n_ms; ++m) {
      const Clustering c = cluster_cell(ms_range[m], counts);
      cell_v[e * n_ms + m] = score(enc.ids, enc.names.size(), c, beta).v;
    }
  });

  std::size_t best = 0;
  for (std::size_t cell = 1; cell < cell_v.size(); ++cell)
    if (cell_v[cell] > cell_v[best]) best = cell;

  GridSearchResult out;
  out.grid_size = cell_v.size();
  out.best_params = {eps_range[best / n_ms], ms_range[best % n_ms]};
  out.best_clustering = cluster_cell(out.best_params.min_samples, counts_for(out.best_params.eps));
  out.best_scores = score(enc.ids, enc.names.size(), out.best_clustering, beta);
  out.best_v = out.best_scores.v;
  return out;
}

/// Grid over the default eps and min_samples ranges.
inline GridSearchResult dbscan_grid(const DistanceMatrix& dm, std::span<const std::string> truth,
                                    double beta = 1.0, unsigned workers = 1) {
  const auto eps = default_eps_range();
  const auto ms = default_min_samples_range(dm.size());
  return dbscan_grid(dm, truth, eps, ms, beta, workers);
}

}  // namespace tc
