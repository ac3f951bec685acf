#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "untangle/event_model.hpp"

namespace untangle {

inline std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) out.emplace_back(text.substr(start));
      break;
    }
    out.emplace_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return out;
}

/// Line diff as a single whole-text hunk (every line of both sides shown).
/// Identical inputs produce just the two headers.
inline std::string unified_diff(std::string_view before, std::string_view after, std::string_view label) {
  const auto a = split_lines(before);
  const auto b = split_lines(after);
  std::string out = "--- a/" + std::string(label) + "\n+++ b/" + std::string(label) + "\n";
  if (a == b) return out;

  // lcs[i][j]: longest common subsequence of a[i..] and b[j..]
  std::vector<std::vector<std::size_t>> lcs(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = a.size(); i-- > 0;)
    for (std::size_t j = b.size(); j-- > 0;)
      lcs[i][j] = a[i] == b[j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);

  auto range = [](std::size_t n) {
    return std::string(n == 0 ? "0,0" : "1," + std::to_string(n));
  };
  out += "@@ -" + range(a.size()) + " +" + range(b.size()) + " @@\n";
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (i < a.size() && j < b.size() && a[i] == b[j]) {
      out += " " + a[i++] + "\n";
      ++j;
    } else if (i < a.size() && (j == b.size() || lcs[i + 1][j] >= lcs[i][j + 1])) {
      out += "-" + a[i++] + "\n";
    } else {
      out += "+" + b[j++] + "\n";
    }
  }
  return out;
}

inline std::string class_definition_text(const ChangeEvent& e, const std::vector<std::string>& ivars) {
  std::string names;
  for (const auto& v : ivars) names += (names.empty() ? "" : " ") + v;
  return "Object subclass: #" + e.className + "\n\tinstanceVariableNames: '" + names + "'\n\tpackage: '" +
         e.packageName + "'";
}

/// Diff shown to a reviewer: method source for method events, the class
/// definition for class events. Absent sides diff as empty text.
inline std::string change_diff(const ChangeEvent& e) {
  if (e.is_method()) return unified_diff(e.sourceBefore, e.sourceAfter, e.className + ">>" + e.selector);
  const std::string before =
      e.kind == ChangeKind::ClassAdded ? std::string() : class_definition_text(e, e.instanceVarsBefore);
  const std::string after =
      e.kind == ChangeKind::ClassRemoved ? std::string() : class_definition_text(e, e.instanceVarsAfter);
  return unified_diff(before, after, e.className);
}

}  // namespace untangle
