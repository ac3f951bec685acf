#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "untangle/error.hpp"
#include "untangle/event_model.hpp"
#include "untangle/hungarian.hpp"
#include "untangle/session_io.hpp"

namespace untangle {

/// |a ∩ b| / |a ∪ b|; two empty sets score 0.
inline double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::size_t common = 0;
  for (const auto& x : a) common += b.contains(x) ? 1 : 0;
  const std::size_t all = a.size() + b.size() - common;
  return all == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(all);
}

struct MatchResult {
  // (computed cluster, expected cluster); padding clusters are named
  // "virtual-1", "virtual-2", ... on the side that had fewer clusters.
  std::vector<std::pair<std::string, std::string>> pairs;
  double totalJaccard = 0.0;
  double successRate = 0.0;
  std::map<std::string, bool> perChange;
};

struct PaddedClusters {
  std::vector<std::string> ids;
  std::vector<std::set<std::string>> members;
};

inline PaddedClusters padded_clusters(const Clustering& c, std::size_t count) {
  PaddedClusters out;
  for (const auto& cl : c.clusters()) {
    out.ids.push_back(cl.id);
    out.members.emplace_back(cl.members.begin(), cl.members.end());
  }
  for (std::size_t v = 1; out.ids.size() < count; ++v) {
    out.ids.push_back("virtual-" + std::to_string(v));
    out.members.emplace_back();
  }
  return out;
}

inline std::vector<std::vector<double>> jaccard_matrix(const PaddedClusters& computed, const PaddedClusters& expected) {
  std::vector<std::vector<double>> m(computed.ids.size(), std::vector<double>(expected.ids.size()));
  for (std::size_t i = 0; i < computed.ids.size(); ++i)
    for (std::size_t j = 0; j < expected.ids.size(); ++j) m[i][j] = jaccard(computed.members[i], expected.members[j]);
  return m;
}

/// Optimal one-to-one correspondence between computed and expected
/// clusters (maximum total Jaccard index). A change counts as successfully
/// clustered when its computed and expected clusters are matched together.
inline MatchResult match_clusterings(const Clustering& computed, const Clustering& expected) {
  if (computed.assignment().size() != expected.size())
    throw ValidationError("clusterings cover different numbers of changes");
  for (const auto& [change, cluster] : computed.records()) {
    if (!expected.contains(change))
      throw ValidationError("change '" + change + "' missing from the expected clustering");
  }
  const std::size_t k = std::max(computed.clusters().size(), expected.clusters().size());
  const PaddedClusters c = padded_clusters(computed, k);
  const PaddedClusters e = padded_clusters(expected, k);
  const auto weights = jaccard_matrix(c, e);
  const auto assignment = hungarian_max_weight(weights);

  MatchResult r;
  std::map<std::string, std::string> partner;  // computed id -> expected id
  for (std::size_t i = 0; i < k; ++i) {
    r.pairs.emplace_back(c.ids[i], e.ids[assignment[i]]);
    r.totalJaccard += weights[i][assignment[i]];
    partner[c.ids[i]] = e.ids[assignment[i]];
  }
  std::size_t ok = 0;
  for (const auto& [change, cluster] : computed.records()) {
    const bool success = partner[cluster] == expected.cluster_of(change);
    r.perChange[change] = success;
    ok += success ? 1 : 0;
  }
  r.successRate = computed.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(computed.size());
  return r;
}

inline double success_rate(const Clustering& computed, const Clustering& expected) {
  if (computed.empty() && expected.empty()) throw Error("success rate is undefined for zero changes");
  return match_clusterings(computed, expected).successRate;
}

/// One report per line: {successRate, totalJaccard, matching, perChange}.
inline std::string match_report_line(const MatchResult& r) {
  json matching = json::array();
  for (const auto& [c, e] : r.pairs) matching.push_back({{"computed", c}, {"expected", e}});
  json per_change = json::object();
  for (const auto& [id, ok] : r.perChange) per_change[id] = ok;
  return json{{"successRate", r.successRate},
              {"totalJaccard", r.totalJaccard},
              {"matching", std::move(matching)},
              {"perChange", std::move(per_change)}}
             .dump() +
         "\n";
}

}  // namespace untangle
