#pragma once

// Model assessment procedures: cross validation, permutation importance,
// voter trimming and the per-developer experiment designs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "untangle/dataset.hpp"
#include "untangle/error.hpp"
#include "untangle/event_model.hpp"
#include "untangle/metrics.hpp"
#include "untangle/model.hpp"
#include "untangle/random.hpp"

namespace untangle {

// Stream tags keep the seeds of the different random steps apart.
namespace seed_stream {
inline constexpr std::uint64_t kFolds = 1;
inline constexpr std::uint64_t kRebalance = 2;
inline constexpr std::uint64_t kTrain = 3;
inline constexpr std::uint64_t kSplit = 4;
inline constexpr std::uint64_t kPermute = 5;
}  // namespace seed_stream

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return mix_seed(mix_seed(seed, stream), index);
}

/// Seeded shuffle cut into `folds` contiguous groups whose sizes differ by
/// at most one (the first n % folds groups get the extra sample). Returns
/// the fold number of every sample.
inline std::vector<std::size_t> assign_folds(std::size_t n, std::size_t folds, std::uint64_t seed) {
  if (folds == 0) throw Error("fold count must be positive");
  if (n < folds) throw Error("need at least " + std::to_string(folds) + " samples for " +
                             std::to_string(folds) + "-fold cross validation, got " + std::to_string(n));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(seed, seed_stream::kFolds));
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::size_t> fold_of(n);
  const std::size_t base = n / folds;
  const std::size_t extra = n % folds;
  std::size_t at = 0;
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    for (std::size_t k = 0; k < size; ++k) fold_of[order[at++]] = f;
  }
  return fold_of;
}

struct CrossValidation {
  Metrics mean;
  std::vector<Metrics> folds;
};

/// k-fold cross validation; each training split is rebalanced before
/// training, test folds are scored as they are.
inline CrossValidation cross_validate(const Dataset& ds, std::size_t folds, const Trainer& trainer,
                                      std::uint64_t seed) {
  const auto fold_of = assign_folds(ds.size(), folds, seed);
  CrossValidation cv;
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    for (std::size_t i = 0; i < ds.size(); ++i) (fold_of[i] == f ? test_rows : train_rows).push_back(i);
    const Dataset train = rebalance(ds.subset(train_rows), derive_seed(seed, seed_stream::kRebalance, f));
    const Model model = trainer(train, derive_seed(seed, seed_stream::kTrain, f));
    cv.folds.push_back(evaluate_metrics(model, ds.subset(test_rows)));
  }
  cv.mean = mean_metrics(cv.folds);
  return cv;
}

struct VoterImportance {
  std::string name;
  std::size_t index = 0;  // column in the dataset
  double meanDrop = 0.0;
  std::size_t timesRankedFirst = 0;
};

struct ImportanceReport {
  std::vector<std::string> featureNames;
  std::vector<std::vector<double>> drops;  // [run][feature]
  std::vector<VoterImportance> ranking;    // most important first
};

inline double accuracy_on(const Model& m, const Dataset& ds) { return evaluate_metrics(m, ds).acc; }

/// Held-out permutation importance: per run a seeded 70/30 split, a model
/// trained on the 70 %, and for every column the accuracy lost on the 30 %
/// once that column is shuffled. Importance is the mean loss over runs.
inline ImportanceReport permutation_importance(const Dataset& ds, const Trainer& trainer, std::size_t runs,
                                               std::uint64_t seed, double train_fraction = 0.7) {
  if (ds.empty()) throw Error("importance needs a non-empty dataset");
  if (runs == 0) throw Error("importance needs at least one run");
  const std::size_t d = ds.featureNames.size();
  ImportanceReport report;
  report.featureNames = ds.featureNames;
  std::vector<std::size_t> first_counts(d, 0);
  for (std::size_t r = 0; r < runs; ++r) {
    std::vector<std::size_t> order(ds.size());
    std::iota(order.begin(), order.end(), 0);
    Rng split_rng(derive_seed(seed, seed_stream::kSplit, r));
    split_rng.shuffle(std::span<std::size_t>(order));
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(ds.size())));
    if (n_train == 0 || n_train >= ds.size()) throw Error("dataset too small for a train/test split");
    std::vector<std::size_t> train_rows(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> test_rows(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());
    const Dataset test = ds.subset(test_rows);
    const Model model = trainer(ds.subset(train_rows), derive_seed(seed, seed_stream::kTrain, r));
    const double baseline = accuracy_on(model, test);

    std::vector<double> drops(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
      std::vector<double> column;
      column.reserve(test.size());
      for (const auto& s : test.samples) column.push_back(s.features[j]);
      Rng perm_rng(derive_seed(derive_seed(seed, seed_stream::kPermute, r), 0, j));
      perm_rng.shuffle(std::span<double>(column));
      Dataset permuted = test;
      for (std::size_t i = 0; i < permuted.size(); ++i) permuted.samples[i].features[j] = column[i];
      drops[j] = baseline - accuracy_on(model, permuted);
    }
    const auto top = static_cast<std::size_t>(std::max_element(drops.begin(), drops.end()) - drops.begin());
    ++first_counts[top];
    report.drops.push_back(std::move(drops));
  }
  for (std::size_t j = 0; j < d; ++j) {
    double sum = 0.0;
    for (const auto& run : report.drops) sum += run[j];
    report.ranking.push_back({ds.featureNames[j], j, sum / static_cast<double>(runs), first_counts[j]});
  }
  std::stable_sort(report.ranking.begin(), report.ranking.end(),
                   [](const VoterImportance& a, const VoterImportance& b) { return a.meanDrop > b.meanDrop; });
  return report;
}

struct TrimStep {
  std::string dropped;
  double accuracy = 0.0;
  bool accepted = false;
};

struct TrimResult {
  std::vector<std::string> subset;  // in dataset column order
  double fullAccuracy = 0.0;
  double subsetAccuracy = 0.0;
  std::vector<TrimStep> steps;
};

struct TrimOptions {
  double maxAccLoss = 0.03;
  std::size_t folds = 10;
  std::uint64_t seed = 0;
};

/// Drops voters from the least important upward while the cross-validated
/// accuracy stays within `maxAccLoss` of the full model; stops at the first
/// drop that costs more, and never drops the last voter.
inline TrimResult trim_voters(const Dataset& ds, const std::vector<std::string>& ranking, const Trainer& trainer,
                              const TrimOptions& opt = {}) {
  for (const auto& name : ds.featureNames) {
    if (std::find(ranking.begin(), ranking.end(), name) == ranking.end())
      throw Error("ranking does not cover voter '" + name + "'");
  }
  auto in_column_order = [&](const std::vector<std::string>& keep) {
    std::vector<std::string> out;
    for (const auto& name : ds.featureNames)
      if (std::find(keep.begin(), keep.end(), name) != keep.end()) out.push_back(name);
    return out;
  };
  auto cv_accuracy = [&](const std::vector<std::string>& names) {
    return cross_validate(select_features(ds, names), opt.folds, trainer, opt.seed).mean.acc;
  };

  TrimResult result;
  std::vector<std::string> current = in_column_order(ranking);
  result.fullAccuracy = cv_accuracy(current);
  result.subsetAccuracy = result.fullAccuracy;
  const double floor = result.fullAccuracy - opt.maxAccLoss - 1e-12;
  for (auto it = ranking.rbegin(); it != ranking.rend() && current.size() > 1; ++it) {
    std::vector<std::string> candidate;
    for (const auto& name : current)
      if (name != *it) candidate.push_back(name);
    if (candidate.size() == current.size()) continue;
    const double acc = cv_accuracy(candidate);
    const bool ok = acc >= floor;
    result.steps.push_back({*it, acc, ok});
    if (!ok) break;
    current = std::move(candidate);
    result.subsetAccuracy = acc;
  }
  result.subset = std::move(current);
  return result;
}

enum class ExperimentMode { IntraDev, CrossDev, Combined };

inline std::string_view to_string(ExperimentMode mode) {
  switch (mode) {
    case ExperimentMode::IntraDev: return "intradev";
    case ExperimentMode::CrossDev: return "crossdev";
    case ExperimentMode::Combined: return "combined";
  }
  return "?";
}

inline ExperimentMode parse_experiment_mode(std::string_view text) {
  if (text == "intradev") return ExperimentMode::IntraDev;
  if (text == "crossdev") return ExperimentMode::CrossDev;
  if (text == "combined") return ExperimentMode::Combined;
  throw Error("unknown experiment mode '" + std::string(text) + "'");
}

struct LabeledSession {
  SessionLog log;
  Clustering truth;
};

struct ExperimentRow {
  std::string configuration;
  std::string trainDevelopers;
  std::string testDevelopers;
  std::size_t trainSamples = 0;
  std::size_t testSamples = 0;
  Metrics metrics;
};

/// Pair datasets pooled per developer, keyed by developer id.
inline std::map<std::string, Dataset> datasets_by_developer(const std::vector<LabeledSession>& sessions,
                                                            double window = kPairWindowSeconds) {
  std::map<std::string, std::vector<Dataset>> parts;
  for (const auto& s : sessions) parts[s.log.developerId].push_back(build_pairs(s.log, s.truth, window));
  std::map<std::string, Dataset> out;
  for (auto& [dev, list] : parts) {
    out[dev] = concat(list);
    out[dev].provenance = {dev};
  }
  return out;
}

inline std::vector<ExperimentRow> run_dev_experiment(const std::vector<LabeledSession>& sessions, ExperimentMode mode,
                                                     const Trainer& trainer, std::size_t folds, std::uint64_t seed) {
  const auto by_dev = datasets_by_developer(sessions);
  std::vector<ExperimentRow> rows;
  switch (mode) {
    case ExperimentMode::IntraDev:
      for (const auto& [dev, ds] : by_dev) {
        rows.push_back({"intradev:" + dev, dev, dev, ds.size(), ds.size(),
                        cross_validate(ds, folds, trainer, seed).mean});
      }
      break;
    case ExperimentMode::CrossDev:
      if (by_dev.size() < 2) throw Error("crossdev needs sessions from at least two developers");
      for (const auto& [train_dev, train_ds] : by_dev) {
        const Dataset train = rebalance(train_ds, derive_seed(seed, seed_stream::kRebalance, 0));
        const Model model = trainer(train, derive_seed(seed, seed_stream::kTrain, 0));
        for (const auto& [test_dev, test_ds] : by_dev) {
          if (test_dev == train_dev) continue;
          rows.push_back({"crossdev:" + train_dev + "->" + test_dev, train_dev, test_dev, train.size(),
                          test_ds.size(), evaluate_metrics(model, test_ds)});
        }
      }
      break;
    case ExperimentMode::Combined: {
      if (by_dev.empty()) throw Error("combined needs at least one session");
      std::vector<Dataset> all;
      std::string devs;
      for (const auto& [dev, ds] : by_dev) {
        all.push_back(ds);
        devs += (devs.empty() ? "" : "+") + dev;
      }
      const Dataset pooled = concat(all);
      rows.push_back({"combined", devs, devs, pooled.size(), pooled.size(),
                      cross_validate(pooled, folds, trainer, seed).mean});
      break;
    }
  }
  return rows;
}

}  // namespace untangle
