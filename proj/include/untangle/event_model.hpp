#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "untangle/error.hpp"

namespace untangle {

enum class ChangeKind {
  ClassAdded,
  ClassModified,
  ClassRemoved,
  MethodAdded,
  MethodModified,
  MethodRemoved,
};

enum class TestOutcome { Pass, Fail, Error };

inline std::string_view to_string(ChangeKind kind) {
  switch (kind) {
    case ChangeKind::ClassAdded: return "class-added";
    case ChangeKind::ClassModified: return "class-modified";
    case ChangeKind::ClassRemoved: return "class-removed";
    case ChangeKind::MethodAdded: return "method-added";
    case ChangeKind::MethodModified: return "method-modified";
    case ChangeKind::MethodRemoved: return "method-removed";
  }
  return "?";
}

inline std::optional<ChangeKind> parse_change_kind(std::string_view text) {
  for (auto kind : {ChangeKind::ClassAdded, ChangeKind::ClassModified, ChangeKind::ClassRemoved,
                    ChangeKind::MethodAdded, ChangeKind::MethodModified, ChangeKind::MethodRemoved}) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

inline std::string_view to_string(TestOutcome outcome) {
  switch (outcome) {
    case TestOutcome::Pass: return "pass";
    case TestOutcome::Fail: return "fail";
    case TestOutcome::Error: return "error";
  }
  return "?";
}

inline std::optional<TestOutcome> parse_test_outcome(std::string_view text) {
  for (auto outcome : {TestOutcome::Pass, TestOutcome::Fail, TestOutcome::Error}) {
    if (to_string(outcome) == text) return outcome;
  }
  return std::nullopt;
}

constexpr bool is_method_kind(ChangeKind kind) {
  return kind == ChangeKind::MethodAdded || kind == ChangeKind::MethodModified ||
         kind == ChangeKind::MethodRemoved;
}

/// One saved modification of a class definition or a method.
struct ChangeEvent {
  std::string id;
  std::string developerId;
  double timestamp = 0.0;  // UTC seconds since epoch
  ChangeKind kind = ChangeKind::MethodModified;
  std::string packageName;
  std::string className;
  std::string selector;  // method events only
  std::vector<std::string> instanceVarsBefore;  // class events only
  std::vector<std::string> instanceVarsAfter;
  std::string sourceBefore;  // method events only
  std::string sourceAfter;

  bool is_method() const { return is_method_kind(kind); }

  // After-source when present, otherwise the before-source.
  const std::string& effective_source() const {
    return sourceAfter.empty() ? sourceBefore : sourceAfter;
  }

  bool operator==(const ChangeEvent&) const = default;
};

struct TestRunEvent {
  std::string id;
  double timestamp = 0.0;
  std::string testSuiteId;
  TestOutcome outcome = TestOutcome::Pass;

  bool operator==(const TestRunEvent&) const = default;
};

using SessionEntry = std::variant<ChangeEvent, TestRunEvent>;

inline const std::string& entry_id(const SessionEntry& entry) {
  return std::visit([](const auto& e) -> const std::string& { return e.id; }, entry);
}

inline double entry_timestamp(const SessionEntry& entry) {
  return std::visit([](const auto& e) { return e.timestamp; }, entry);
}

/// The fine-grained IDE history of one developer, in recording order.
struct SessionLog {
  std::string developerId;
  std::vector<SessionEntry> entries;

  std::vector<const ChangeEvent*> changes() const {
    std::vector<const ChangeEvent*> out;
    for (const auto& entry : entries) {
      if (const auto* change = std::get_if<ChangeEvent>(&entry)) out.push_back(change);
    }
    return out;
  }

  std::size_t change_count() const {
    std::size_t n = 0;
    for (const auto& entry : entries) n += std::holds_alternative<ChangeEvent>(entry) ? 1 : 0;
    return n;
  }

  bool operator==(const SessionLog&) const = default;
};

namespace detail {

inline void check_change_shape(const ChangeEvent& e, const std::string& where) {
  auto fail = [&](const std::string& what) {
    throw ValidationError("malformed event at " + where + " (" + e.id + "): " + what);
  };
  if (e.is_method()) {
    if (e.selector.empty()) fail("method event without selector");
    if (!e.instanceVarsBefore.empty() || !e.instanceVarsAfter.empty())
      fail("method event carries instance variables");
    switch (e.kind) {
      case ChangeKind::MethodAdded:
        if (!e.sourceBefore.empty() || e.sourceAfter.empty())
          fail("method-added needs empty sourceBefore and non-empty sourceAfter");
        break;
      case ChangeKind::MethodRemoved:
        if (e.sourceBefore.empty() || !e.sourceAfter.empty())
          fail("method-removed needs non-empty sourceBefore and empty sourceAfter");
        break;
      default:
        if (e.sourceBefore.empty() || e.sourceAfter.empty())
          fail("method-modified needs both sources");
        break;
    }
  } else {
    if (!e.selector.empty()) fail("class event with selector");
    if (!e.sourceBefore.empty() || !e.sourceAfter.empty()) fail("class event with method source");
  }
}

}  // namespace detail

/// Checks every session invariant and returns the log unchanged. Throws
/// ValidationError naming the first offending entry index.
inline const SessionLog& validate_session(const SessionLog& log) {
  std::unordered_set<std::string> seen;
  double previous = -INFINITY;
  for (std::size_t i = 0; i < log.entries.size(); ++i) {
    const auto& entry = log.entries[i];
    const std::string where = "entry " + std::to_string(i);
    const std::string& id = entry_id(entry);
    const double ts = entry_timestamp(entry);
    if (id.empty()) throw ValidationError("empty id at " + where);
    if (!seen.insert(id).second) throw ValidationError("duplicate id '" + id + "' at " + where);
    if (!std::isfinite(ts)) throw ValidationError("non-finite timestamp at " + where);
    if (ts < previous) throw ValidationError("timestamp regression at " + where);
    previous = ts;
    if (const auto* change = std::get_if<ChangeEvent>(&entry)) {
      detail::check_change_shape(*change, where);
      if (!log.developerId.empty() && change->developerId != log.developerId)
        throw ValidationError("developer mismatch at " + where);
    }
  }
  return log;
}

/// A partition of change ids into named clusters. Records keep insertion
/// order so serialization is reproducible.
class Clustering {
 public:
  struct Cluster {
    std::string id;
    std::vector<std::string> members;
    bool operator==(const Cluster&) const = default;
  };

  Clustering() = default;

  static Clustering from_clusters(const std::vector<Cluster>& clusters) {
    Clustering c;
    for (const auto& cluster : clusters) {
      if (cluster.members.empty())
        throw ValidationError("cluster '" + cluster.id + "' is empty");
      for (const auto& m : cluster.members) c.assign(m, cluster.id);
    }
    return c;
  }

  void assign(const std::string& changeId, const std::string& clusterId) {
    if (changeId.empty() || clusterId.empty())
      throw ValidationError("empty change or cluster id in clustering");
    if (!index_.emplace(changeId, records_.size()).second)
      throw ValidationError("change '" + changeId + "' assigned twice");
    records_.emplace_back(changeId, clusterId);
  }

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  bool contains(const std::string& changeId) const { return index_.contains(changeId); }

  const std::string& cluster_of(const std::string& changeId) const {
    auto it = index_.find(changeId);
    if (it == index_.end()) throw ValidationError("change '" + changeId + "' is not clustered");
    return records_[it->second].second;
  }

  const std::vector<std::pair<std::string, std::string>>& records() const { return records_; }

  // Clusters ordered by first appearance of their id.
  std::vector<Cluster> clusters() const {
    std::vector<Cluster> out;
    std::unordered_map<std::string, std::size_t> pos;
    for (const auto& [change, cluster] : records_) {
      auto [it, fresh] = pos.emplace(cluster, out.size());
      if (fresh) out.push_back({cluster, {}});
      out[it->second].members.push_back(change);
    }
    return out;
  }

  std::map<std::string, std::string> assignment() const {
    return {records_.begin(), records_.end()};
  }

  // Same assignment map; record order is irrelevant.
  bool operator==(const Clustering& other) const { return assignment() == other.assignment(); }

 private:
  std::vector<std::pair<std::string, std::string>> records_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Both clusterings partition the same set of change ids.
inline bool same_partition(const Clustering& a, const Clustering& b) {
  if (a.size() != b.size()) return false;
  // Canonical form: each cluster as its sorted member list.
  auto canon = [](const Clustering& c) {
    std::vector<std::vector<std::string>> sets;
    for (auto cl : c.clusters()) {
      std::sort(cl.members.begin(), cl.members.end());
      sets.push_back(std::move(cl.members));
    }
    std::sort(sets.begin(), sets.end());
    return sets;
  };
  return canon(a) == canon(b);
}

/// Throws unless `c` assigns exactly the change events of `log`.
inline void validate_clustering(const Clustering& c, const SessionLog& log) {
  std::size_t changes = 0;
  for (const auto& entry : log.entries) {
    const auto* change = std::get_if<ChangeEvent>(&entry);
    if (change == nullptr) continue;
    ++changes;
    if (!c.contains(change->id))
      throw ValidationError("change '" + change->id + "' missing from clustering");
  }
  if (changes != c.size()) {
    std::unordered_set<std::string> ids;
    for (const auto* change : log.changes()) ids.insert(change->id);
    for (const auto& [change, cluster] : c.records()) {
      if (!ids.contains(change))
        throw ValidationError("clustering references unknown change '" + change + "'");
    }
  }
}

}  // namespace untangle
