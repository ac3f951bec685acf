#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "untangle/code_facts.hpp"
#include "untangle/error.hpp"
#include "untangle/event_model.hpp"

namespace untangle {

// Fixed feature order. Model files store these names, so the order and the
// spelling are part of the file format.
enum class Voter : std::size_t {
  SamePackage,
  SameClass,
  SameSelector,
  BothCosmeticChanges,
  SameTestRun,
  NumberOfEntriesDistance,
  TimeDifference,
  ReciprocalMessageSends,
  NumberOfSharedMessageSends,
  NumberOfSharedMessageSendsInDelta,
  NumberOfVariableAccesses,
  NumberOfSharedVariableAccesses,
  NumberOfSharedVariableAccessesInDelta,
};

constexpr std::size_t kVoterCount = 13;

enum class FeatureType { Boolean, Nominal, Numeric };

struct VoterInfo {
  std::string_view name;
  FeatureType type;
};

inline constexpr std::array<VoterInfo, kVoterCount> kVoters{{
    {"samePackage", FeatureType::Boolean},
    {"sameClass", FeatureType::Boolean},
    {"sameSelector", FeatureType::Boolean},
    {"bothCosmeticChanges", FeatureType::Boolean},
    {"sameTestRun", FeatureType::Boolean},
    {"numberOfEntriesDistance", FeatureType::Numeric},
    {"timeDifference", FeatureType::Numeric},
    {"reciprocalMessageSends", FeatureType::Nominal},
    {"numberOfSharedMessageSends", FeatureType::Numeric},
    {"numberOfSharedMessageSendsInDelta", FeatureType::Numeric},
    {"numberOfVariableAccesses", FeatureType::Numeric},
    {"numberOfSharedVariableAccesses", FeatureType::Numeric},
    {"numberOfSharedVariableAccessesInDelta", FeatureType::Numeric},
}};

inline constexpr std::string_view voter_name(Voter v) { return kVoters[static_cast<std::size_t>(v)].name; }

inline std::vector<std::string> all_voter_names() {
  std::vector<std::string> names;
  for (const auto& info : kVoters) names.emplace_back(info.name);
  return names;
}

inline std::optional<std::size_t> voter_index(std::string_view name) {
  for (std::size_t i = 0; i < kVoterCount; ++i) {
    if (kVoters[i].name == name) return i;
  }
  return std::nullopt;
}

// Unknown feature names are treated as numeric.
inline FeatureType feature_type(std::string_view name) {
  auto idx = voter_index(name);
  return idx ? kVoters[*idx].type : FeatureType::Numeric;
}

struct VoterVector {
  std::array<double, kVoterCount> values{};

  double& operator[](Voter v) { return values[static_cast<std::size_t>(v)]; }
  double operator[](Voter v) const { return values[static_cast<std::size_t>(v)]; }
  std::span<const double> span() const { return values; }

  bool operator==(const VoterVector&) const = default;
};

/// Per-change facts the voters need, derived once per change.
struct ChangeFacts {
  MethodFacts effective;  // facts of the effective source; empty for class events
  FactDelta delta;
  bool cosmetic = false;  // method-modified whose before and after are AST-equal
  std::set<std::string> changedInstanceVars;
};

inline ChangeFacts derive_change_facts(const ChangeEvent& e) {
  ChangeFacts f;
  try {
    if (e.is_method()) {
      const MethodFacts before = facts_or_empty(e.sourceBefore);
      const MethodFacts after = facts_or_empty(e.sourceAfter);
      f.effective = e.sourceAfter.empty() ? before : after;
      f.delta = {symmetric_difference(before.sends, after.sends),
                 symmetric_difference(before.accesses, after.accesses)};
      f.cosmetic = e.kind == ChangeKind::MethodModified && before.canonicalForm == after.canonicalForm;
    } else {
      const std::set<std::string> before(e.instanceVarsBefore.begin(), e.instanceVarsBefore.end());
      const std::set<std::string> after(e.instanceVarsAfter.begin(), e.instanceVarsAfter.end());
      switch (e.kind) {
        case ChangeKind::ClassAdded: f.changedInstanceVars = after; break;
        case ChangeKind::ClassRemoved: f.changedInstanceVars = before; break;
        default: f.changedInstanceVars = symmetric_difference(before, after); break;
      }
    }
  } catch (const ParseError& err) {
    throw Error("change '" + e.id + "': " + err.what());
  }
  return f;
}

/// Computes voter vectors for pairs of one session. Facts are derived
/// lazily and cached; call warm() before sharing across threads.
class PairFeaturizer {
 public:
  explicit PairFeaturizer(const SessionLog& log) : log_(log) {
    const std::size_t n = log.entries.size();
    changes_before_.assign(n + 1, 0);
    tests_before_.assign(n + 1, 0);
    facts_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const bool change = std::holds_alternative<ChangeEvent>(log.entries[i]);
      changes_before_[i + 1] = changes_before_[i] + (change ? 1 : 0);
      tests_before_[i + 1] = tests_before_[i] + (change ? 0 : 1);
      position_.emplace(entry_id(log.entries[i]), i);
    }
  }

  const SessionLog& log() const { return log_; }

  std::optional<std::size_t> position(const std::string& id) const {
    auto it = position_.find(id);
    if (it == position_.end()) return std::nullopt;
    return it->second;
  }

  const ChangeEvent& change_at(std::size_t pos) const {
    const auto* e = std::get_if<ChangeEvent>(&log_.entries.at(pos));
    if (e == nullptr) throw Error("entry " + std::to_string(pos) + " is not a change event");
    return *e;
  }

  const ChangeFacts& facts_at(std::size_t pos) const {
    auto& slot = facts_[pos];
    if (!slot) slot = derive_change_facts(change_at(pos));
    return *slot;
  }

  void warm() const {
    for (std::size_t i = 0; i < log_.entries.size(); ++i) {
      if (std::holds_alternative<ChangeEvent>(log_.entries[i])) facts_at(i);
    }
  }

  VoterVector compute(const ChangeEvent& a, const ChangeEvent& b) const {
    return compute_at(locate(a), locate(b));
  }

  VoterVector compute_at(std::size_t pa, std::size_t pb) const {
    if (pa == pb) throw Error("voters need two distinct changes");
    const ChangeEvent& a = change_at(pa);
    const ChangeEvent& b = change_at(pb);
    const ChangeFacts& fa = facts_at(pa);
    const ChangeFacts& fb = facts_at(pb);
    const std::size_t lo = std::min(pa, pb);
    const std::size_t hi = std::max(pa, pb);

    VoterVector v;
    v[Voter::SamePackage] = a.packageName == b.packageName;
    v[Voter::SameClass] = a.className == b.className;
    v[Voter::SameSelector] = a.is_method() && b.is_method() && a.selector == b.selector;
    v[Voter::BothCosmeticChanges] = fa.cosmetic && fb.cosmetic;
    v[Voter::SameTestRun] = tests_before_[hi] == tests_before_[lo + 1];
    v[Voter::NumberOfEntriesDistance] = static_cast<double>(changes_before_[hi] - changes_before_[lo + 1]);
    v[Voter::TimeDifference] = std::fabs(a.timestamp - b.timestamp);

    if (a.is_method() && b.is_method()) {
      v[Voter::ReciprocalMessageSends] = static_cast<double>(fa.effective.sends.contains(b.selector)) +
                                         static_cast<double>(fb.effective.sends.contains(a.selector));
    }
    v[Voter::NumberOfSharedMessageSends] =
        static_cast<double>(intersection_size(fa.effective.sends, fb.effective.sends));
    v[Voter::NumberOfSharedMessageSendsInDelta] =
        static_cast<double>(intersection_size(fa.delta.sends, fb.delta.sends));

    if (!a.is_method() && b.is_method()) {
      v[Voter::NumberOfVariableAccesses] =
          static_cast<double>(intersection_size(fa.changedInstanceVars, fb.effective.accesses));
    } else if (a.is_method() && !b.is_method()) {
      v[Voter::NumberOfVariableAccesses] =
          static_cast<double>(intersection_size(fb.changedInstanceVars, fa.effective.accesses));
    }
    v[Voter::NumberOfSharedVariableAccesses] =
        static_cast<double>(intersection_size(fa.effective.accesses, fb.effective.accesses));
    v[Voter::NumberOfSharedVariableAccessesInDelta] =
        static_cast<double>(intersection_size(fa.delta.accesses, fb.delta.accesses));
    return v;
  }

 private:
  std::size_t locate(const ChangeEvent& e) const {
    auto pos = position(e.id);
    if (!pos) throw Error("change '" + e.id + "' is not part of the session");
    return *pos;
  }

  const SessionLog& log_;
  std::vector<std::size_t> changes_before_;
  std::vector<std::size_t> tests_before_;
  std::unordered_map<std::string, std::size_t> position_;
  mutable std::vector<std::optional<ChangeFacts>> facts_;
};

inline VoterVector compute_voters(const ChangeEvent& a, const ChangeEvent& b, const SessionLog& log) {
  return PairFeaturizer(log).compute(a, b);
}

}  // namespace untangle
