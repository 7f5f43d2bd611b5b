#pragma once

#include <cstddef>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace tc {

inline constexpr int kNoise = -1;

/// Per-document cluster id, or kNoise. Ids are dense in [0, n_clusters) and
/// numbered by first appearance, so equal partitions compare equal.
struct Clustering {
  std::vector<int> assignment;
  int n_clusters = 0;

  std::size_t size() const { return assignment.size(); }
  bool has_noise() const {
    for (int a : assignment)
      if (a == kNoise) return true;
    return false;
  }
  bool operator==(const Clustering&) const = default;
};

/// Canonical form of an arbitrary labelling: negative ids become noise,
/// other ids are renumbered 0, 1, ... in order of first appearance.
inline Clustering make_clustering(const std::vector<int>& raw) {
  Clustering c;
  c.assignment.resize(raw.size(), kNoise);
  std::unordered_map<int, int> remap;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] < 0) continue;
    auto [it, inserted] = remap.emplace(raw[i], c.n_clusters);
    if (inserted) ++c.n_clusters;
    c.assignment[i] = it->second;
  }
  return c;
}

/// Every noise point becomes its own new cluster; existing ids are kept.
inline Clustering noise_to_singletons(const Clustering& clustering) {
  Clustering out = clustering;
  for (int& a : out.assignment)
    if (a == kNoise) a = out.n_clusters++;
  return out;
}

/// Sizes per cluster id; noise is not counted.
inline std::vector<std::size_t> cluster_sizes(const Clustering& c) {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(c.n_clusters), 0);
  for (int a : c.assignment)
    if (a != kNoise) ++sizes[static_cast<std::size_t>(a)];
  return sizes;
}

}  // namespace tc
