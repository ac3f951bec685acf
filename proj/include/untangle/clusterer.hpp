#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "untangle/dataset.hpp"
#include "untangle/error.hpp"
#include "untangle/event_model.hpp"
#include "untangle/model.hpp"
#include "untangle/voters.hpp"

namespace untangle {

/// Dense symmetric matrix of same-task probabilities. The diagonal is unused.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  explicit SimilarityMatrix(std::size_t n) : n_(n), cells_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return cells_[i * n_ + j]; }

  void set(std::size_t i, std::size_t j, double value) {
    cells_[i * n_ + j] = value;
    cells_[j * n_ + i] = value;
  }

  void set_entry(std::size_t i, std::size_t j, double value) { cells_[i * n_ + j] = value; }

  void validate() const {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i + 1; j < n_; ++j) {
        const double v = (*this)(i, j);
        if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("similarity out of [0,1] at (" + std::to_string(i) + "," + std::to_string(j) + ")");
        if (v != (*this)(j, i)) throw ValidationError("similarity matrix is not symmetric");
      }
    }
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> cells_;
};

struct CutConfig {
  double lowSimilarityBound = 0.25;
  double pairWindowSeconds = kPairWindowSeconds;
};

/// Model probabilities for every change pair of `changes` (in that order);
/// pairs at least `window` seconds apart score 0.
inline SimilarityMatrix score_matrix(const std::vector<const ChangeEvent*>& changes, const SessionLog& log,
                                     const Model& model, double window = kPairWindowSeconds) {
  PairFeaturizer featurizer(log);
  std::vector<std::size_t> pos;
  for (const auto* c : changes) {
    auto p = featurizer.position(c->id);
    if (!p) throw Error("change '" + c->id + "' is not part of the session");
    pos.push_back(*p);
  }
  SimilarityMatrix m(changes.size());
  for (std::size_t i = 0; i < changes.size(); ++i) {
    for (std::size_t j = i + 1; j < changes.size(); ++j) {
      if (!(std::fabs(changes[i]->timestamp - changes[j]->timestamp) < window)) continue;
      m.set(i, j, predict(model, featurizer.compute_at(pos[i], pos[j])));
    }
  }
  return m;
}

/// Binary merge tree. Nodes [0, leaves) are leaves (matrix rows); every
/// later node records a merge; the last node is the root.
struct Dendrogram {
  struct Node {
    int left = -1;
    int right = -1;
    double level = 1.0;  // similarity at which the children merged
    std::size_t minLeaf = 0;
  };
  std::size_t leaves = 0;
  std::vector<Node> nodes;

  bool is_leaf(std::size_t i) const { return i < leaves; }
  std::size_t root() const { return nodes.size() - 1; }

  std::vector<double> merge_levels() const {
    std::vector<double> out;
    for (std::size_t i = leaves; i < nodes.size(); ++i) out.push_back(nodes[i].level);
    return out;
  }

  std::vector<std::size_t> leaves_under(std::size_t node) const {
    std::vector<std::size_t> out;
    std::vector<std::size_t> stack{node};
    while (!stack.empty()) {
      const std::size_t at = stack.back();
      stack.pop_back();
      if (is_leaf(at)) {
        out.push_back(at);
      } else {
        stack.push_back(static_cast<std::size_t>(nodes[at].right));
        stack.push_back(static_cast<std::size_t>(nodes[at].left));
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }
};

/// Average-linkage agglomeration: repeatedly merges the two clusters with
/// the highest mean cross-pair similarity. Ties go to the pair whose
/// smallest leaf indices are lexicographically smallest.
inline Dendrogram agglomerate(const SimilarityMatrix& sim) {
  sim.validate();
  const std::size_t n = sim.size();
  if (n == 0) throw ValidationError("cannot cluster zero changes");
  Dendrogram d;
  d.leaves = n;
  for (std::size_t i = 0; i < n; ++i) d.nodes.push_back({-1, -1, 1.0, i});

  // Active clusters: dendrogram node, size, and summed similarity to every
  // other active cluster (indexed by slot).
  std::vector<std::size_t> node_of(n);
  std::vector<double> size(n, 1.0);
  std::vector<std::vector<double>> sum(n, std::vector<double>(n, 0.0));
  std::vector<bool> alive(n, true);
  for (std::size_t i = 0; i < n; ++i) {
    node_of[i] = i;
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) sum[i][j] = sim(i, j);
  }

  for (std::size_t step = 1; step < n; ++step) {
    double best = -1.0;
    std::size_t bi = 0, bj = 0;
    std::pair<std::size_t, std::size_t> best_key{SIZE_MAX, SIZE_MAX};
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!alive[j]) continue;
        const double avg = sum[i][j] / (size[i] * size[j]);
        const std::size_t mi = d.nodes[node_of[i]].minLeaf;
        const std::size_t mj = d.nodes[node_of[j]].minLeaf;
        const std::pair<std::size_t, std::size_t> key{std::min(mi, mj), std::max(mi, mj)};
        if (avg > best || (avg == best && key < best_key)) {
          best = avg;
          bi = i;
          bj = j;
          best_key = key;
        }
      }
    }
    const auto& left = d.nodes[node_of[bi]];
    const auto& right = d.nodes[node_of[bj]];
    // clamp away rounding-level inversions so levels never rise toward the root
    const double level = std::min({best, left.level, right.level});
    Dendrogram::Node merged{static_cast<int>(node_of[bi]), static_cast<int>(node_of[bj]), level,
                            std::min(left.minLeaf, right.minLeaf)};
    if (d.nodes[node_of[bj]].minLeaf < d.nodes[node_of[bi]].minLeaf) std::swap(merged.left, merged.right);
    d.nodes.push_back(merged);

    for (std::size_t k = 0; k < n; ++k) {
      if (!alive[k] || k == bi || k == bj) continue;
      sum[bi][k] += sum[bj][k];
      sum[k][bi] = sum[bi][k];
    }
    size[bi] += size[bj];
    alive[bj] = false;
    node_of[bi] = d.nodes.size() - 1;
  }
  return d;
}

/// Cutting threshold: the midpoint of the widest gap in the descending
/// sequence [bound, levels below bound..., 0]. Without any level below the
/// bound the threshold is 0 and nothing is split.
inline double cut_threshold(const Dendrogram& d, const CutConfig& cfg = {}) {
  std::vector<double> low;
  for (double level : d.merge_levels())
    if (level < cfg.lowSimilarityBound) low.push_back(level);
  if (low.empty()) return 0.0;
  std::sort(low.begin(), low.end(), std::greater<>());
  std::vector<double> seq;
  seq.push_back(cfg.lowSimilarityBound);
  seq.insert(seq.end(), low.begin(), low.end());
  seq.push_back(0.0);
  double widest = -1.0;
  double threshold = 0.0;
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    const double gap = seq[i] - seq[i + 1];
    if (gap > widest) {
      widest = gap;
      threshold = 0.5 * (seq[i] + seq[i + 1]);
    }
  }
  return threshold;
}

/// Undoes every merge below `threshold`; each remaining subtree is a
/// cluster, returned as sorted leaf index lists.
inline std::vector<std::vector<std::size_t>> cut_at(const Dendrogram& d, double threshold) {
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<std::size_t> stack{d.root()};
  while (!stack.empty()) {
    const std::size_t at = stack.back();
    stack.pop_back();
    if (!d.is_leaf(at) && d.nodes[at].level < threshold) {
      stack.push_back(static_cast<std::size_t>(d.nodes[at].right));
      stack.push_back(static_cast<std::size_t>(d.nodes[at].left));
    } else {
      clusters.push_back(d.leaves_under(at));
    }
  }
  return clusters;
}

struct UntangleResult {
  Clustering clustering;
  SimilarityMatrix similarity;
  Dendrogram dendrogram;
  double threshold = 0.0;
};

/// Builds the clustering for `changes` (entry order) from a cut dendrogram.
/// Clusters are named T1, T2, ... by earliest member timestamp.
inline Clustering clustering_from_cut(const std::vector<const ChangeEvent*>& changes,
                                      std::vector<std::vector<std::size_t>> groups) {
  std::sort(groups.begin(), groups.end(), [&](const auto& a, const auto& b) {
    const double ta = changes[a.front()]->timestamp;
    const double tb = changes[b.front()]->timestamp;
    return ta < tb || (ta == tb && a.front() < b.front());
  });
  Clustering out;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t i : groups[g]) out.assign(changes[i]->id, "T" + std::to_string(g + 1));
  }
  return out;
}

/// Clusters `changes` given their pairwise similarity (row i = changes[i]).
inline UntangleResult untangle_similarity(const std::vector<const ChangeEvent*>& changes, SimilarityMatrix sim,
                                          const CutConfig& cfg = {}) {
  if (sim.size() != changes.size()) throw Error("similarity matrix does not match the change list");
  UntangleResult r;
  r.similarity = std::move(sim);
  r.dendrogram = agglomerate(r.similarity);
  r.threshold = cut_threshold(r.dendrogram, cfg);
  r.clustering = clustering_from_cut(changes, cut_at(r.dendrogram, r.threshold));
  return r;
}

inline UntangleResult untangle_detailed(const SessionLog& log, const Model& model, const CutConfig& cfg = {}) {
  const auto changes = log.changes();
  if (changes.empty()) throw Error("session has no change events to untangle");
  return untangle_similarity(changes, score_matrix(changes, log, model, cfg.pairWindowSeconds), cfg);
}

inline Clustering untangle(const SessionLog& log, const Model& model, const CutConfig& cfg = {}) {
  return untangle_detailed(log, model, cfg).clustering;
}

}  // namespace untangle
