#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "untangle/dataset.hpp"
#include "untangle/error.hpp"
#include "untangle/model.hpp"

namespace untangle {

inline constexpr double kDecisionThreshold = 0.5;

struct Metrics {
  std::optional<double> auc;  // absent when only one class is present
  double acc = 0.0;
  double prec = 0.0;
  double rec = 0.0;
  double fmeasure = 0.0;
  double gmean = 0.0;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

/// AUC as the Mann-Whitney rank statistic: the probability that a random
/// positive outscores a random negative, ties counting one half.
inline std::optional<double> rank_auc(std::span<const double> scores, std::span<const unsigned char> labels) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double positives = 0.0;
  double rank_sum = 0.0;  // doubled mid-ranks keep the sum integral
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double doubled_mid_rank = static_cast<double>(i + 1 + j);  // 2 * mean(i+1 .. j)
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]]) {
        positives += 1.0;
        rank_sum += doubled_mid_rank;
      }
    }
    i = j;
  }
  const double negatives = static_cast<double>(n) - positives;
  if (positives == 0.0 || negatives == 0.0) return std::nullopt;
  const double u_doubled = rank_sum - positives * (positives + 1.0);
  return u_doubled / (2.0 * positives * negatives);
}

/// Confusion-matrix metrics at `threshold` (score >= threshold predicts
/// true); ratios with an empty denominator are reported as 0.
inline Metrics metrics_from_scores(std::span<const double> scores, std::span<const unsigned char> labels,
                                   double threshold = kDecisionThreshold) {
  if (scores.empty()) throw Error("metrics need at least one sample");
  Metrics m;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (labels[i]) (predicted ? m.tp : m.fn)++;
    else (predicted ? m.fp : m.tn)++;
  }
  auto ratio = [](double num, double den) { return den > 0 ? num / den : 0.0; };
  const double tp = static_cast<double>(m.tp), fp = static_cast<double>(m.fp);
  const double fn = static_cast<double>(m.fn), tn = static_cast<double>(m.tn);
  m.acc = (tp + tn) / static_cast<double>(scores.size());
  m.prec = ratio(tp, tp + fp);
  m.rec = ratio(tp, tp + fn);
  m.fmeasure = ratio(2.0 * m.prec * m.rec, m.prec + m.rec);
  m.gmean = std::sqrt(m.rec * ratio(tn, tn + fp));
  m.auc = rank_auc(scores, labels);
  return m;
}

inline std::vector<unsigned char> labels_of(const Dataset& ds) {
  std::vector<unsigned char> out;
  out.reserve(ds.size());
  for (const auto& s : ds.samples) out.push_back(s.label ? 1 : 0);
  return out;
}

inline std::vector<double> scores_of(const Model& m, const Dataset& ds) {
  std::vector<double> out;
  out.reserve(ds.size());
  for (const auto& s : ds.samples) out.push_back(predict(m, std::span<const double>(s.features)));
  return out;
}

inline Metrics evaluate_metrics(const Model& m, const Dataset& ds, double threshold = kDecisionThreshold) {
  if (ds.empty()) throw Error("cannot evaluate on an empty dataset");
  if (ds.featureNames != m.featureNames) throw Error("dataset features do not match the model");
  const auto scores = scores_of(m, ds);
  const auto labels = labels_of(ds);
  return metrics_from_scores(scores, labels, threshold);
}

/// Mean of each rate across runs; AUC averages the runs where it is
/// defined; confusion counts are summed.
inline Metrics mean_metrics(std::span<const Metrics> runs) {
  Metrics out;
  if (runs.empty()) return out;
  double auc_sum = 0.0;
  std::size_t auc_n = 0;
  for (const auto& r : runs) {
    out.acc += r.acc;
    out.prec += r.prec;
    out.rec += r.rec;
    out.fmeasure += r.fmeasure;
    out.gmean += r.gmean;
    out.tp += r.tp;
    out.fp += r.fp;
    out.fn += r.fn;
    out.tn += r.tn;
    if (r.auc) {
      auc_sum += *r.auc;
      ++auc_n;
    }
  }
  const double k = static_cast<double>(runs.size());
  out.acc /= k;
  out.prec /= k;
  out.rec /= k;
  out.fmeasure /= k;
  out.gmean /= k;
  if (auc_n > 0) out.auc = auc_sum / static_cast<double>(auc_n);
  return out;
}

inline json metrics_to_json(const Metrics& m) {
  json j{{"acc", m.acc}, {"prec", m.prec}, {"rec", m.rec}, {"fmeasure", m.fmeasure}, {"gmean", m.gmean},
         {"tp", m.tp}, {"fp", m.fp}, {"fn", m.fn}, {"tn", m.tn}};
  j["auc"] = m.auc ? json(*m.auc) : json(nullptr);
  return j;
}

}  // namespace untangle
