#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "threatcluster/clustering.hpp"

// External cluster validity: homogeneity, completeness and V-measure over
// a class x cluster contingency table. Entropies use natural logarithms;
// the base cancels in every ratio below.

namespace tc {

struct ContingencyTable {
  std::size_t n_classes = 0;
  std::size_t n_clusters = 0;
  std::vector<std::size_t> counts;  // row-major [class][cluster]
  std::vector<std::size_t> class_totals;
  std::vector<std::size_t> cluster_totals;
  std::size_t n = 0;

  std::size_t at(std::size_t cls, std::size_t cluster) const {
    return counts[cls * n_clusters + cluster];
  }
};

struct ClusterScores {
  double h = 0;
  double c = 0;
  double v = 0;
  double beta = 1;

  bool operator==(const ClusterScores&) const = default;
};

/// Class ids 0..k-1 assigned in sorted order of the label strings.
struct EncodedLabels {
  std::vector<int> ids;
  std::vector<std::string> names;
};

inline EncodedLabels encode_labels(std::span<const std::string> labels) {
  std::map<std::string, int> index;
  for (const auto& l : labels) index.emplace(l, 0);
  EncodedLabels out;
  for (auto& [name, id] : index) {
    id = static_cast<int>(out.names.size());
    out.names.push_back(name);
  }
  out.ids.reserve(labels.size());
  for (const auto& l : labels) out.ids.push_back(index[l]);
  return out;
}

/// Table from dense class ids in [0, n_classes). The clustering must not
/// contain noise; apply noise_to_singletons first.
inline ContingencyTable contingency(std::span<const int> class_ids, std::size_t n_classes,
                                    const Clustering& pred) {
  if (class_ids.size() != pred.size())
    throw std::invalid_argument("contingency: truth has " + std::to_string(class_ids.size()) +
                                " labels, prediction has " + std::to_string(pred.size()));
  ContingencyTable t;
  t.n_classes = n_classes;
  t.n_clusters = static_cast<std::size_t>(pred.n_clusters);
  t.counts.assign(t.n_classes * t.n_clusters, 0);
  t.class_totals.assign(t.n_classes, 0);
  t.cluster_totals.assign(t.n_clusters, 0);
  t.n = class_ids.size();
  for (std::size_t i = 0; i < class_ids.size(); ++i) {
    const int k = pred.assignment[i];
    if (k == kNoise) throw std::invalid_argument("contingency: prediction contains noise");
    const int cls = class_ids[i];
    if (cls < 0 || static_cast<std::size_t>(cls) >= n_classes)
      throw std::invalid_argument("contingency: class id out of range");
    ++t.counts[static_cast<std::size_t>(cls) * t.n_clusters + static_cast<std::size_t>(k)];
    ++t.class_totals[static_cast<std::size_t>(cls)];
    ++t.cluster_totals[static_cast<std::size_t>(k)];
  }
  return t;
}

inline ContingencyTable contingency(std::span<const std::string> truth, const Clustering& pred) {
  if (truth.size() != pred.size())
    throw std::invalid_argument("contingency: truth has " + std::to_string(truth.size()) +
                                " labels, prediction has " + std::to_string(pred.size()));
  const auto enc = encode_labels(truth);
  return contingency(enc.ids, enc.names.size(), pred);
}

inline double v_measure(double h, double c, double beta = 1.0) {
  const double denom = beta * h + c;
  return denom > 0 ? (1 + beta) * h * c / denom : 0.0;
}

inline ClusterScores homogeneity_completeness_v(const ContingencyTable& t, double beta = 1.0) {
  if (t.n == 0) throw std::invalid_argument("homogeneity_completeness_v: empty table");
  if (!(beta > 0)) throw std::invalid_argument("homogeneity_completeness_v: beta must be > 0");
  const double n = static_cast<double>(t.n);

  auto entropy = [n](const std::vector<std::size_t>& totals) {
    double h = 0;
    for (auto m : totals)
      if (m > 0) {
        const double p = static_cast<double>(m) / n;
        h -= p * std::log(p);
      }
    return h;
  };
  const double h_class = entropy(t.class_totals);
  const double h_cluster = entropy(t.cluster_totals);

  double h_class_given_cluster = 0, h_cluster_given_class = 0;
  for (std::size_t c = 0; c < t.n_classes; ++c)
    for (std::size_t k = 0; k < t.n_clusters; ++k) {
      const auto a = t.at(c, k);
      if (a == 0) continue;
      const double joint = static_cast<double>(a) / n;
      h_class_given_cluster -= joint * std::log(static_cast<double>(a) /
                                                static_cast<double>(t.cluster_totals[k]));
      h_cluster_given_class -= joint * std::log(static_cast<double>(a) /
                                                static_cast<double>(t.class_totals[c]));
    }

  ClusterScores s;
  s.beta = beta;
  s.h = h_class == 0 ? 1.0 : std::clamp(1.0 - h_class_given_cluster / h_class, 0.0, 1.0);
  s.c = h_cluster == 0 ? 1.0 : std::clamp(1.0 - h_cluster_given_class / h_cluster, 0.0, 1.0);
  s.v = v_measure(s.h, s.c, beta);
  return s;
}

/// Percentage of documents saved by reading one item per cluster.
inline double reduction(std::size_t n_docs, std::size_t n_clusters) {
  if (n_docs == 0) throw std::invalid_argument("reduction: n_docs must be >= 1");
  return 100.0 * (1.0 - static_cast<double>(n_clusters) / static_cast<double>(n_docs));
}

/// noise_to_singletons -> contingency -> homogeneity_completeness_v.
inline ClusterScores score(std::span<const std::string> truth, const Clustering& pred,
                           double beta = 1.0) {
  return homogeneity_completeness_v(contingency(truth, noise_to_singletons(pred)), beta);
}

inline ClusterScores score(std::span<const int> class_ids, std::size_t n_classes,
                           const Clustering& pred, double beta = 1.0) {
  return homogeneity_completeness_v(contingency(class_ids, n_classes, noise_to_singletons(pred)),
                                    beta);
}

}  // namespace tc
