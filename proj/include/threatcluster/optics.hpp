#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "threatcluster/clustering.hpp"
#include "threatcluster/distance.hpp"

// OPTICS ordering plus xi-steep cluster extraction. Both follow the
// scikit-learn implementation step for step (including its rounding of
// core and reachability distances to 15 decimals), so labels can be
// cross-checked against it.

namespace tc {

struct OpticsResult {
  Clustering clustering;
  std::vector<std::size_t> ordering;
  std::vector<double> reachability;    // indexed by point, inf if never reached
  std::vector<double> core_distances;  // indexed by point
  std::vector<long> predecessor;       // -1 if none
  std::vector<std::pair<std::size_t, std::size_t>> clusters;  // [start, end] in ordering space
};

namespace detail {

inline double round15(double x) {
  if (!std::isfinite(x)) return x;
  return std::nearbyint(x * 1e15) / 1e15;
}

inline std::size_t extend_region_end(const std::vector<char>& steep, const std::vector<char>& xward,
                                     std::size_t start, std::size_t min_samples) {
  const std::size_t n = steep.size();
  std::size_t non_xward = 0;
  std::size_t end = start;
  for (std::size_t index = start; index < n; ++index) {
    if (steep[index]) {
      non_xward = 0;
      end = index;
    } else if (!xward[index]) {
      if (++non_xward > min_samples) break;
    } else {
      return end;
    }
  }
  return end;
}

struct SteepDownArea {
  std::size_t start, end;
  double mib;
};

inline void update_filter_sdas(std::vector<SteepDownArea>& sdas, double mib, double xi_complement,
                               const std::vector<double>& plot) {
  if (std::isinf(mib)) {
    sdas.clear();
    return;
  }
  std::vector<SteepDownArea> kept;
  for (auto sda : sdas)
    if (mib <= plot[sda.start] * xi_complement) {
      sda.mib = std::max(sda.mib, mib);
      kept.push_back(sda);
    }
  sdas = std::move(kept);
}

inline std::optional<std::pair<std::size_t, std::size_t>> correct_predecessor(
    const std::vector<double>& plot, const std::vector<long>& pred_plot,
    const std::vector<std::size_t>& ordering, std::size_t s, std::size_t e) {
  while (s < e) {
    if (plot[s] > plot[e]) return std::pair{s, e};
    const long p_e = pred_plot[e];
    for (std::size_t i = s; i < e; ++i)
      if (p_e == static_cast<long>(ordering[i])) return std::pair{s, e};
    --e;
  }
  return std::nullopt;
}

inline std::vector<std::pair<std::size_t, std::size_t>> xi_clusters(
    std::vector<double> plot, const std::vector<long>& pred_plot,
    const std::vector<std::size_t>& ordering, double xi, std::size_t min_samples,
    std::size_t min_cluster_size) {
  const std::size_t n = plot.size();
  plot.push_back(std::numeric_limits<double>::infinity());
  const double xi_complement = 1 - xi;

  // Comparisons involving NaN ratios (inf/inf, 0/0) are false, as in numpy.
  std::vector<char> steep_up(n), steep_down(n), down(n), up(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ratio = plot[i] / plot[i + 1];
    steep_up[i] = ratio <= xi_complement;
    steep_down[i] = ratio >= 1 / xi_complement;
    down[i] = ratio > 1;
    up[i] = ratio < 1;
  }

  std::vector<SteepDownArea> sdas;
  std::vector<std::pair<std::size_t, std::size_t>> clusters;
  std::size_t index = 0;
  double mib = 0.0;

  for (std::size_t steep_index = 0; steep_index < n; ++steep_index) {
    if (!(steep_up[steep_index] || steep_down[steep_index])) continue;
    if (steep_index < index) continue;
    for (std::size_t k = index; k <= steep_index; ++k) mib = std::max(mib, plot[k]);

    if (steep_down[steep_index]) {
      update_filter_sdas(sdas, mib, xi_complement, plot);
      const std::size_t d_start = steep_index;
      const std::size_t d_end = extend_region_end(steep_down, up, d_start, min_samples);
      sdas.push_back({d_start, d_end, 0.0});
      index = d_end + 1;
      mib = plot[index];
    } else {
      update_filter_sdas(sdas, mib, xi_complement, plot);
      const std::size_t u_start = steep_index;
      const std::size_t u_end = extend_region_end(steep_up, down, u_start, min_samples);
      index = u_end + 1;
      mib = plot[index];

      std::vector<std::pair<std::size_t, std::size_t>> u_clusters;
      for (const auto& d : sdas) {
        std::size_t c_start = d.start;
        std::size_t c_end = u_end;
        if (plot[c_end + 1] * xi_complement < d.mib) continue;

        const double d_max = plot[d.start];
        if (d_max * xi_complement >= plot[c_end + 1]) {
          while (plot[c_start + 1] > plot[c_end + 1] && c_start < d.end) ++c_start;
        } else if (plot[c_end + 1] * xi_complement >= d_max) {
          while (c_end > u_start && plot[c_end - 1] > d_max) --c_end;
        }

        const auto corrected = correct_predecessor(plot, pred_plot, ordering, c_start, c_end);
        if (!corrected) continue;
        std::tie(c_start, c_end) = *corrected;

        if (c_end - c_start + 1 < min_cluster_size) continue;
        if (c_start > d.end) continue;
        if (c_end < u_start) continue;
        u_clusters.emplace_back(c_start, c_end);
      }
      clusters.insert(clusters.end(), u_clusters.rbegin(), u_clusters.rend());
    }
  }
  return clusters;
}

}  // namespace detail

/// OPTICS with unbounded max_eps. Core distance is the distance to the
/// min_samples-th nearest point counting the point itself. Clusters come
/// from xi extraction (xi = 0.05, min_cluster_size = min_samples); a
/// cluster is labelled only if none of its points is labelled yet, so
/// nested clusters lose to the smaller ones found first. Unlabelled points
/// are noise. With fewer than min_samples points everything is noise.
inline OpticsResult optics(const DistanceMatrix& dm, std::size_t min_samples, double xi = 0.05) {
  if (min_samples < 2) throw std::invalid_argument("optics: min_samples must be >= 2");
  if (!(xi > 0 && xi < 1)) throw std::invalid_argument("optics: xi must be in (0, 1)");
  const std::size_t n = dm.size();
  const double inf = std::numeric_limits<double>::infinity();

  OpticsResult r;
  r.reachability.assign(n, inf);
  r.predecessor.assign(n, -1);
  r.core_distances.assign(n, inf);
  r.ordering.reserve(n);

  if (n < min_samples) {
    for (std::size_t i = 0; i < n; ++i) r.ordering.push_back(i);
    r.clustering = make_clustering(std::vector<int>(n, kNoise));
    return r;
  }

  std::vector<double> buf(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = dm.row(i);
    std::copy(row.begin(), row.end(), buf.begin());
    std::nth_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(min_samples - 1),
                     buf.end());
    r.core_distances[i] = detail::round15(buf[min_samples - 1]);
  }

  std::vector<char> processed(n, 0);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t point = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (processed[i]) continue;
      if (point == n || r.reachability[i] < r.reachability[point]) point = i;
    }
    processed[point] = 1;
    r.ordering.push_back(point);
    const double core = r.core_distances[point];
    if (core == inf) continue;
    const auto row = dm.row(point);
    for (std::size_t j = 0; j < n; ++j) {
      if (processed[j]) continue;
      const double rd = detail::round15(std::max(row[j], core));
      if (rd < r.reachability[j]) {
        r.reachability[j] = rd;
        r.predecessor[j] = static_cast<long>(point);
      }
    }
  }

  std::vector<double> plot(n);
  std::vector<long> pred_plot(n);
  for (std::size_t k = 0; k < n; ++k) {
    plot[k] = r.reachability[r.ordering[k]];
    pred_plot[k] = r.predecessor[r.ordering[k]];
  }
  r.clusters = detail::xi_clusters(plot, pred_plot, r.ordering, xi, min_samples, min_samples);

  std::vector<int> ordered(n, kNoise);
  int label = 0;
  for (const auto& [s, e] : r.clusters) {
    bool free = true;
    for (std::size_t k = s; k <= e && free; ++k) free = ordered[k] == kNoise;
    if (!free) continue;
    for (std::size_t k = s; k <= e; ++k) ordered[k] = label;
    ++label;
  }
  std::vector<int> labels(n, kNoise);
  for (std::size_t k = 0; k < n; ++k) labels[r.ordering[k]] = ordered[k];
  r.clustering = make_clustering(labels);
  return r;
}

}  // namespace tc
