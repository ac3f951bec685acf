#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "untangle/error.hpp"
#include "untangle/event_model.hpp"
#include "untangle/random.hpp"
#include "untangle/session_io.hpp"
#include "untangle/voters.hpp"

namespace untangle {

// Pairs further apart than three days are never featurized or scored.
inline constexpr double kPairWindowSeconds = 259200.0;

// Down-sampled false:true ratio used for training.
inline constexpr double kFalsePerTrue = 2.0;

struct PairSample {
  std::string idA;  // idA < idB
  std::string idB;
  std::vector<double> features;
  bool label = false;

  bool operator==(const PairSample&) const = default;
};

struct Dataset {
  std::vector<std::string> featureNames;
  std::vector<PairSample> samples;
  std::set<std::string> provenance;  // developer ids

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }

  std::size_t positives() const {
    return static_cast<std::size_t>(
        std::count_if(samples.begin(), samples.end(), [](const PairSample& s) { return s.label; }));
  }

  std::size_t feature_index(const std::string& name) const {
    auto it = std::find(featureNames.begin(), featureNames.end(), name);
    if (it == featureNames.end()) throw Error("dataset has no feature '" + name + "'");
    return static_cast<std::size_t>(it - featureNames.begin());
  }

  Dataset subset(const std::vector<std::size_t>& rows) const {
    Dataset out{featureNames, {}, provenance};
    out.samples.reserve(rows.size());
    for (std::size_t r : rows) out.samples.push_back(samples.at(r));
    return out;
  }

  bool operator==(const Dataset&) const = default;
};

inline std::vector<std::string> full_feature_names() { return all_voter_names(); }

/// Projects `ds` onto the named columns, in the given order.
inline Dataset select_features(const Dataset& ds, const std::vector<std::string>& names) {
  std::vector<std::size_t> cols;
  for (const auto& n : names) cols.push_back(ds.feature_index(n));
  Dataset out{names, {}, ds.provenance};
  out.samples.reserve(ds.size());
  for (const auto& s : ds.samples) {
    PairSample p{s.idA, s.idB, {}, s.label};
    p.features.reserve(cols.size());
    for (std::size_t c : cols) p.features.push_back(s.features[c]);
    out.samples.push_back(std::move(p));
  }
  return out;
}

inline Dataset concat(const std::vector<Dataset>& parts) {
  Dataset out;
  for (const auto& part : parts) {
    if (out.featureNames.empty()) out.featureNames = part.featureNames;
    if (part.featureNames != out.featureNames) throw Error("cannot concatenate datasets with different features");
    out.samples.insert(out.samples.end(), part.samples.begin(), part.samples.end());
    out.provenance.insert(part.provenance.begin(), part.provenance.end());
  }
  return out;
}

/// One labeled sample per unordered change pair closer than `window` seconds.
inline Dataset build_pairs(const SessionLog& log, const Clustering& truth, double window = kPairWindowSeconds) {
  validate_clustering(truth, log);
  PairFeaturizer featurizer(log);
  std::vector<std::size_t> positions;
  for (std::size_t i = 0; i < log.entries.size(); ++i) {
    if (std::holds_alternative<ChangeEvent>(log.entries[i])) positions.push_back(i);
  }
  Dataset ds;
  ds.featureNames = full_feature_names();
  if (!log.developerId.empty()) ds.provenance.insert(log.developerId);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const ChangeEvent& a = featurizer.change_at(positions[i]);
    for (std::size_t j = i + 1; j < positions.size(); ++j) {
      const ChangeEvent& b = featurizer.change_at(positions[j]);
      if (!(std::fabs(a.timestamp - b.timestamp) < window)) continue;
      const VoterVector v = featurizer.compute_at(positions[i], positions[j]);
      PairSample s;
      s.idA = std::min(a.id, b.id);
      s.idB = std::max(a.id, b.id);
      s.features.assign(v.values.begin(), v.values.end());
      s.label = truth.cluster_of(a.id) == truth.cluster_of(b.id);
      ds.samples.push_back(std::move(s));
    }
  }
  return ds;
}

/// Keeps every true sample and a seeded uniform subset of at most twice as
/// many false samples. Surviving samples keep their original order.
inline Dataset rebalance(const Dataset& ds, std::uint64_t seed) {
  std::vector<std::size_t> trues;
  std::vector<std::size_t> falses;
  for (std::size_t i = 0; i < ds.size(); ++i) (ds.samples[i].label ? trues : falses).push_back(i);
  const auto wanted = static_cast<std::size_t>(kFalsePerTrue * static_cast<double>(trues.size()));
  if (falses.size() > wanted) {
    Rng rng(seed);
    rng.shuffle(std::span<std::size_t>(falses));
    falses.resize(wanted);
  }
  std::vector<std::size_t> keep = trues;
  keep.insert(keep.end(), falses.begin(), falses.end());
  std::sort(keep.begin(), keep.end());
  return ds.subset(keep);
}

inline std::string dataset_to_string(const Dataset& ds) {
  std::string out = json{{"featureNames", ds.featureNames}, {"provenance", ds.provenance}}.dump();
  out += '\n';
  for (const auto& s : ds.samples) {
    out += json{{"idA", s.idA}, {"idB", s.idB}, {"label", s.label}, {"features", s.features}}.dump();
    out += '\n';
  }
  return out;
}

/// First record is the header {featureNames, provenance}; each further
/// record is one sample.
inline Dataset dataset_from_string(const std::string& text) {
  Dataset ds;
  bool header = true;
  for (const auto& [line, content] : record_lines(text)) {
    const json record = detail::parse_record(content, line);
    if (header) {
      ds.featureNames = detail::names_field(record, "featureNames", line);
      const auto prov = detail::names_field(record, "provenance", line);
      ds.provenance.insert(prov.begin(), prov.end());
      header = false;
      continue;
    }
    PairSample s;
    s.idA = detail::string_field(record, "idA", line);
    s.idB = detail::string_field(record, "idB", line);
    const json& label = detail::require_field(record, "label", line);
    if (!label.is_boolean()) throw FormatError("line " + std::to_string(line) + ": label must be boolean");
    s.label = label.get<bool>();
    const json& features = detail::require_field(record, "features", line);
    if (!features.is_array() || features.size() != ds.featureNames.size())
      throw FormatError("line " + std::to_string(line) + ": feature arity mismatch");
    for (const auto& f : features) {
      if (!f.is_number()) throw FormatError("line " + std::to_string(line) + ": non-numeric feature");
      s.features.push_back(f.get<double>());
      if (!std::isfinite(s.features.back()))
        throw FormatError("line " + std::to_string(line) + ": non-finite feature");
    }
    ds.samples.push_back(std::move(s));
  }
  if (header) throw FormatError("dataset file has no header record");
  return ds;
}

inline Dataset read_dataset(const std::filesystem::path& path) {
  try {
    return dataset_from_string(read_file(path));
  } catch (const Error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

inline void write_dataset(const Dataset& ds, const std::filesystem::path& path) {
  write_file_atomically(path, dataset_to_string(ds));
}

}  // namespace untangle
