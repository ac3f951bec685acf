#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "untangle/dataset.hpp"
#include "untangle/models/logistic.hpp"
#include "untangle/voters.hpp"

namespace untangle {

// Levels of the nominal voter (reciprocal sends: 0, 1 or 2).
inline constexpr std::size_t kNominalLevels = 3;
inline constexpr double kVarianceFloor = 1e-9;

/// Per-class likelihood of one feature. Index 0 is the false class.
struct NaiveBayesFeature {
  FeatureType type = FeatureType::Numeric;
  std::array<double, 2> pOne{};                         // Boolean
  std::array<std::vector<double>, 2> levels{};          // Nominal
  std::array<double, 2> mean{};                         // Numeric
  std::array<double, 2> variance{};

  bool operator==(const NaiveBayesFeature&) const = default;
};

struct NaiveBayesModel {
  std::array<double, 2> prior{};
  std::vector<NaiveBayesFeature> features;

  bool operator==(const NaiveBayesModel&) const = default;
};

inline std::size_t nominal_level(double x) {
  const double r = std::round(x);
  return static_cast<std::size_t>(std::clamp(r, 0.0, static_cast<double>(kNominalLevels - 1)));
}

inline double log_likelihood(const NaiveBayesFeature& f, std::size_t cls, double x) {
  switch (f.type) {
    case FeatureType::Boolean: return std::log(x >= 0.5 ? f.pOne[cls] : 1.0 - f.pOne[cls]);
    case FeatureType::Nominal: return std::log(f.levels[cls][nominal_level(x)]);
    case FeatureType::Numeric: {
      const double v = f.variance[cls];
      const double d = x - f.mean[cls];
      return -0.5 * std::log(2.0 * std::numbers::pi * v) - d * d / (2.0 * v);
    }
  }
  return 0.0;
}

inline double predict(const NaiveBayesModel& m, std::span<const double> x) {
  double logit = std::log(m.prior[1]) - std::log(m.prior[0]);
  for (std::size_t j = 0; j < m.features.size(); ++j)
    logit += log_likelihood(m.features[j], 1, x[j]) - log_likelihood(m.features[j], 0, x[j]);
  return sigmoid(logit);
}

/// Class priors from frequencies; Laplace (+1) smoothing for Boolean and
/// nominal features; Gaussian numeric features with a variance floor.
inline NaiveBayesModel train_naive_bayes(const Dataset& ds) {
  require_both_classes(ds);
  const std::size_t d = ds.featureNames.size();
  std::array<double, 2> count{};
  for (const auto& s : ds.samples) count[s.label ? 1 : 0] += 1.0;

  NaiveBayesModel m;
  const double n = static_cast<double>(ds.size());
  m.prior = {count[0] / n, count[1] / n};
  m.features.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    NaiveBayesFeature& f = m.features[j];
    f.type = feature_type(ds.featureNames[j]);
    for (std::size_t c = 0; c < 2; ++c) {
      switch (f.type) {
        case FeatureType::Boolean: {
          double ones = 0.0;
          for (const auto& s : ds.samples)
            if ((s.label ? 1u : 0u) == c && s.features[j] >= 0.5) ones += 1.0;
          f.pOne[c] = (ones + 1.0) / (count[c] + 2.0);
          break;
        }
        case FeatureType::Nominal: {
          std::vector<double> hits(kNominalLevels, 0.0);
          for (const auto& s : ds.samples)
            if ((s.label ? 1u : 0u) == c) hits[nominal_level(s.features[j])] += 1.0;
          for (auto& h : hits) h = (h + 1.0) / (count[c] + static_cast<double>(kNominalLevels));
          f.levels[c] = std::move(hits);
          break;
        }
        case FeatureType::Numeric: {
          double sum = 0.0;
          for (const auto& s : ds.samples)
            if ((s.label ? 1u : 0u) == c) sum += s.features[j];
          const double mu = sum / count[c];
          double sq = 0.0;
          for (const auto& s : ds.samples)
            if ((s.label ? 1u : 0u) == c) sq += (s.features[j] - mu) * (s.features[j] - mu);
          f.mean[c] = mu;
          f.variance[c] = std::max(sq / count[c], kVarianceFloor);
          break;
        }
      }
    }
  }
  return m;
}

}  // namespace untangle
