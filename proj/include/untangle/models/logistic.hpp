#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "untangle/dataset.hpp"
#include "untangle/error.hpp"
#include "untangle/voters.hpp"

namespace untangle {

struct LogisticHyper {
  double learningRate = 0.1;
  int epochs = 500;
  double l2 = 1e-4;
};

/// Binary logistic regression over z-scored numeric features. Boolean and
/// nominal features enter unscaled (mean 0, stddev 1).
struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;
  std::vector<double> mean;
  std::vector<double> stddev;

  bool operator==(const LogisticModel&) const = default;
};

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline double predict(const LogisticModel& m, std::span<const double> x) {
  double z = m.bias;
  for (std::size_t j = 0; j < m.weights.size(); ++j) z += m.weights[j] * (x[j] - m.mean[j]) / m.stddev[j];
  return sigmoid(z);
}

inline void require_both_classes(const Dataset& ds) {
  const std::size_t pos = ds.positives();
  if (pos == 0 || pos == ds.size()) throw Error("training needs samples of both classes");
}

inline LogisticModel train_logistic(const Dataset& ds, const LogisticHyper& hyper = {}) {
  require_both_classes(ds);
  const std::size_t n = ds.size();
  const std::size_t d = ds.featureNames.size();
  LogisticModel m;
  m.weights.assign(d, 0.0);
  m.mean.assign(d, 0.0);
  m.stddev.assign(d, 1.0);
  for (std::size_t j = 0; j < d; ++j) {
    if (feature_type(ds.featureNames[j]) != FeatureType::Numeric) continue;
    double sum = 0.0;
    for (const auto& s : ds.samples) sum += s.features[j];
    const double mu = sum / static_cast<double>(n);
    double sq = 0.0;
    for (const auto& s : ds.samples) sq += (s.features[j] - mu) * (s.features[j] - mu);
    const double sd = std::sqrt(sq / static_cast<double>(n));
    m.mean[j] = mu;
    m.stddev[j] = sd > 1e-12 ? sd : 1.0;
  }

  std::vector<std::vector<double>> z(n, std::vector<double>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) z[i][j] = (ds.samples[i].features[j] - m.mean[j]) / m.stddev[j];
  }

  std::vector<double> grad(d);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_bias = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double logit = m.bias;
      for (std::size_t j = 0; j < d; ++j) logit += m.weights[j] * z[i][j];
      const double err = sigmoid(logit) - (ds.samples[i].label ? 1.0 : 0.0);
      for (std::size_t j = 0; j < d; ++j) grad[j] += err * z[i][j];
      grad_bias += err;
    }
    for (std::size_t j = 0; j < d; ++j)
      m.weights[j] -= hyper.learningRate * (grad[j] * inv_n + hyper.l2 * m.weights[j]);
    m.bias -= hyper.learningRate * grad_bias * inv_n;
  }
  return m;
}

}  // namespace untangle
