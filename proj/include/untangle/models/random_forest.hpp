#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <thread>
#include <vector>

#include "untangle/dataset.hpp"
#include "untangle/models/logistic.hpp"
#include "untangle/random.hpp"

namespace untangle {

struct ForestConfig {
  std::size_t trees = 500;
  std::size_t varsPerSplit = 5;  // clamped to the feature count
  std::size_t threads = 1;       // results do not depend on this
};

/// Internal nodes send x[feature] <= threshold to `left`. Leaves have
/// feature == -1 and carry the true-class fraction of their samples.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double probability = 0.0;

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct DecisionTree {
  std::uint64_t seed = 0;
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  bool operator==(const DecisionTree&) const = default;
};

struct RandomForestModel {
  std::vector<DecisionTree> trees;

  bool operator==(const RandomForestModel&) const = default;
};

inline double predict(const DecisionTree& tree, std::span<const double> x) {
  std::size_t at = 0;
  while (!tree.nodes[at].is_leaf()) {
    const TreeNode& n = tree.nodes[at];
    at = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return tree.nodes[at].probability;
}

inline double predict(const RandomForestModel& m, std::span<const double> x) {
  double sum = 0.0;
  for (const auto& t : m.trees) sum += predict(t, x);
  return m.trees.empty() ? 0.5 : sum / static_cast<double>(m.trees.size());
}

namespace detail {

// Column-major copy of the training matrix.
struct Columns {
  std::vector<std::vector<double>> values;
  std::vector<unsigned char> labels;

  explicit Columns(const Dataset& ds) : values(ds.featureNames.size()), labels(ds.size()) {
    for (auto& col : values) col.resize(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
      labels[i] = ds.samples[i].label ? 1 : 0;
      for (std::size_t j = 0; j < values.size(); ++j) values[j][i] = ds.samples[i].features[j];
    }
  }
};

// Sum of n * gini over both sides, written with integer counts.
inline double weighted_gini(double pos, double n) {
  if (n <= 0) return 0.0;
  const double neg = n - pos;
  return n - (pos * pos + neg * neg) / n;
}

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double score = 0.0;
};

inline Split best_split(const Columns& data, std::span<const std::size_t> rows,
                        std::span<const std::size_t> features, double parent_score,
                        std::vector<std::size_t>& scratch) {
  Split best;
  best.score = parent_score;
  double total_pos = 0.0;
  for (std::size_t r : rows) total_pos += data.labels[r];
  const double n = static_cast<double>(rows.size());
  for (std::size_t f : features) {
    const auto& col = data.values[f];
    scratch.assign(rows.begin(), rows.end());
    std::sort(scratch.begin(), scratch.end(), [&](std::size_t a, std::size_t b) {
      return col[a] < col[b] || (col[a] == col[b] && a < b);
    });
    double left_pos = 0.0;
    for (std::size_t i = 0; i + 1 < scratch.size(); ++i) {
      left_pos += data.labels[scratch[i]];
      const double v = col[scratch[i]];
      if (!(v < col[scratch[i + 1]])) continue;
      const double left_n = static_cast<double>(i + 1);
      const double score = weighted_gini(left_pos, left_n) + weighted_gini(total_pos - left_pos, n - left_n);
      // Strict improvement keeps the lowest feature index, then the lowest
      // threshold, on ties.
      if (score < best.score - 1e-12) {
        const double next = col[scratch[i + 1]];
        double mid = v + (next - v) / 2.0;
        if (!(mid < next)) mid = v;
        best = {static_cast<int>(f), mid, score};
      }
    }
  }
  return best;
}

}  // namespace detail

/// Grows one unpruned tree on `rows` (duplicates allowed, as produced by a
/// bootstrap draw), sampling `vars_per_split` candidate features per node.
inline DecisionTree grow_tree(const detail::Columns& data, std::vector<std::size_t> rows,
                              std::size_t vars_per_split, Rng& rng) {
  DecisionTree tree;
  const std::size_t num_features = data.values.size();
  vars_per_split = std::clamp<std::size_t>(vars_per_split, 1, std::max<std::size_t>(num_features, 1));
  std::vector<std::size_t> feature_pool(num_features);
  std::vector<std::size_t> scratch;

  struct Pending {
    std::size_t node;
    std::size_t begin;
    std::size_t end;
  };
  tree.nodes.emplace_back();
  std::vector<Pending> stack{{0, 0, rows.size()}};
  while (!stack.empty()) {
    const Pending job = stack.back();
    stack.pop_back();
    std::span<std::size_t> mine(rows.data() + job.begin, job.end - job.begin);
    double pos = 0.0;
    for (std::size_t r : mine) pos += data.labels[r];
    const double n = static_cast<double>(mine.size());
    tree.nodes[job.node].probability = n > 0 ? pos / n : 0.0;
    if (pos == 0.0 || pos == n || num_features == 0) continue;

    std::iota(feature_pool.begin(), feature_pool.end(), 0);
    for (std::size_t k = 0; k < vars_per_split; ++k)
      std::swap(feature_pool[k], feature_pool[k + rng.below(num_features - k)]);
    std::vector<std::size_t> candidates(feature_pool.begin(), feature_pool.begin() + vars_per_split);
    std::sort(candidates.begin(), candidates.end());

    const detail::Split split =
        detail::best_split(data, mine, candidates, detail::weighted_gini(pos, n), scratch);
    if (split.feature < 0) continue;

    const auto& col = data.values[static_cast<std::size_t>(split.feature)];
    auto middle = std::stable_partition(mine.begin(), mine.end(),
                                        [&](std::size_t r) { return col[r] <= split.threshold; });
    const std::size_t cut = job.begin + static_cast<std::size_t>(middle - mine.begin());
    const int left = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    TreeNode& node = tree.nodes[job.node];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = left;
    node.right = left + 1;
    // right child is pushed first so the left subtree is finished first
    stack.push_back({static_cast<std::size_t>(left + 1), cut, job.end});
    stack.push_back({static_cast<std::size_t>(left), job.begin, cut});
  }
  return tree;
}

inline DecisionTree grow_tree(const Dataset& ds, std::vector<std::size_t> rows, std::size_t vars_per_split,
                              Rng& rng) {
  return grow_tree(detail::Columns(ds), std::move(rows), vars_per_split, rng);
}

/// Bagged Gini trees. Tree i draws its bootstrap sample and split features
/// from a stream seeded by mix_seed(seed, i), so the forest depends only on
/// (dataset order, seed, config).
inline RandomForestModel train_random_forest(const Dataset& ds, const ForestConfig& cfg, std::uint64_t seed) {
  require_both_classes(ds);
  const detail::Columns data(ds);
  const std::size_t n = ds.size();
  RandomForestModel m;
  m.trees.resize(cfg.trees);
  auto build = [&](std::size_t t) {
    const std::uint64_t tree_seed = mix_seed(seed, t);
    Rng rng(tree_seed);
    std::vector<std::size_t> rows(n);
    for (auto& r : rows) r = rng.below(n);
    m.trees[t] = grow_tree(data, std::move(rows), cfg.varsPerSplit, rng);
    m.trees[t].seed = tree_seed;
  };
  const std::size_t workers = std::min(std::max<std::size_t>(cfg.threads, 1), std::max<std::size_t>(cfg.trees, 1));
  if (workers == 1) {
    for (std::size_t t = 0; t < cfg.trees; ++t) build(t);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t t = w; t < cfg.trees; t += workers) build(t);
      });
    }
  }
  return m;
}

}  // namespace untangle
