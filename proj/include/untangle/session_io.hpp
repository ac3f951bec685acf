#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "untangle/error.hpp"
#include "untangle/event_model.hpp"

namespace untangle {

using json = nlohmann::json;

// Writes `contents` next to `path` and renames it into place, so a failed
// run never leaves a truncated output file behind.
inline void write_file_atomically(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    out << contents;
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw Error("write to '" + tmp.string() + "' failed");
    }
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Splits into lines, dropping a trailing '\r' and skipping blank lines.
// Each element keeps its 1-based line number.
inline std::vector<std::pair<std::size_t, std::string>> record_lines(const std::string& text) {
  std::vector<std::pair<std::size_t, std::string>> out;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out.emplace_back(number, std::move(line));
  }
  return out;
}

namespace detail {

inline const json& require_field(const json& record, const char* name, std::size_t line) {
  auto it = record.find(name);
  if (it == record.end())
    throw FormatError("line " + std::to_string(line) + ": missing field '" + name + "'");
  return *it;
}

inline std::string string_field(const json& record, const char* name, std::size_t line) {
  const auto& v = require_field(record, name, line);
  if (!v.is_string())
    throw FormatError("line " + std::to_string(line) + ": field '" + name + "' must be a string");
  return v.get<std::string>();
}

inline double number_field(const json& record, const char* name, std::size_t line) {
  const auto& v = require_field(record, name, line);
  if (!v.is_number())
    throw FormatError("line " + std::to_string(line) + ": field '" + name + "' must be a number");
  return v.get<double>();
}

inline std::vector<std::string> names_field(const json& record, const char* name, std::size_t line) {
  const auto& v = require_field(record, name, line);
  std::vector<std::string> out;
  if (!v.is_array())
    throw FormatError("line " + std::to_string(line) + ": field '" + name + "' must be a list");
  for (const auto& item : v) {
    if (!item.is_string())
      throw FormatError("line " + std::to_string(line) + ": field '" + name + "' holds a non-string");
    out.push_back(item.get<std::string>());
  }
  return out;
}

inline json parse_record(const std::string& text, std::size_t line) {
  json record;
  try {
    record = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError("line " + std::to_string(line) + ": " + e.what());
  }
  if (!record.is_object()) throw FormatError("line " + std::to_string(line) + ": record is not an object");
  return record;
}

}  // namespace detail

inline json to_record(const ChangeEvent& e) {
  return json{{"type", "change"},
              {"id", e.id},
              {"developerId", e.developerId},
              {"timestamp", e.timestamp},
              {"kind", std::string(to_string(e.kind))},
              {"packageName", e.packageName},
              {"className", e.className},
              {"selector", e.selector},
              {"instanceVarsBefore", e.instanceVarsBefore},
              {"instanceVarsAfter", e.instanceVarsAfter},
              {"sourceBefore", e.sourceBefore},
              {"sourceAfter", e.sourceAfter}};
}

inline json to_record(const TestRunEvent& e) {
  return json{{"type", "testRun"},
              {"id", e.id},
              {"timestamp", e.timestamp},
              {"testSuiteId", e.testSuiteId},
              {"outcome", std::string(to_string(e.outcome))}};
}

inline json to_record(const SessionEntry& entry) {
  return std::visit([](const auto& e) { return to_record(e); }, entry);
}

/// Decodes one session record; `line` is used in diagnostics.
inline SessionEntry entry_from_record(const json& record, std::size_t line) {
  using namespace detail;
  const std::string type = string_field(record, "type", line);
  const std::string prefix = "line " + std::to_string(line) + ": ";
  if (type == "testRun") {
    TestRunEvent e;
    e.id = string_field(record, "id", line);
    e.timestamp = number_field(record, "timestamp", line);
    e.testSuiteId = string_field(record, "testSuiteId", line);
    auto outcome = parse_test_outcome(string_field(record, "outcome", line));
    if (!outcome) throw FormatError(prefix + "unknown test outcome");
    e.outcome = *outcome;
    return e;
  }
  if (type != "change") throw FormatError(prefix + "unknown record type '" + type + "'");
  ChangeEvent e;
  e.id = string_field(record, "id", line);
  e.developerId = string_field(record, "developerId", line);
  e.timestamp = number_field(record, "timestamp", line);
  auto kind = parse_change_kind(string_field(record, "kind", line));
  if (!kind) throw FormatError(prefix + "unknown change kind");
  e.kind = *kind;
  e.packageName = string_field(record, "packageName", line);
  e.className = string_field(record, "className", line);
  e.selector = string_field(record, "selector", line);
  e.instanceVarsBefore = names_field(record, "instanceVarsBefore", line);
  e.instanceVarsAfter = names_field(record, "instanceVarsAfter", line);
  e.sourceBefore = string_field(record, "sourceBefore", line);
  e.sourceAfter = string_field(record, "sourceAfter", line);
  return e;
}

inline std::string session_to_string(const SessionLog& log) {
  std::string out;
  for (const auto& entry : log.entries) {
    out += to_record(entry).dump();
    out += '\n';
  }
  return out;
}

// The developer of a session is the one named on its change records.
inline SessionLog session_from_string(const std::string& text) {
  SessionLog log;
  for (const auto& [line, content] : record_lines(text)) {
    SessionEntry entry = entry_from_record(detail::parse_record(content, line), line);
    if (const auto* change = std::get_if<ChangeEvent>(&entry); change && log.developerId.empty())
      log.developerId = change->developerId;
    log.entries.push_back(std::move(entry));
  }
  validate_session(log);
  return log;
}

inline SessionLog read_session(const std::filesystem::path& path) {
  try {
    return session_from_string(read_file(path));
  } catch (const Error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

inline void write_session(const SessionLog& log, const std::filesystem::path& path) {
  validate_session(log);
  write_file_atomically(path, session_to_string(log));
}

inline std::string clustering_to_string(const Clustering& c) {
  std::string out;
  for (const auto& [change, cluster] : c.records()) {
    out += json{{"changeId", change}, {"clusterId", cluster}}.dump();
    out += '\n';
  }
  return out;
}

/// Parses clustering records; when `session` is given every record must name
/// one of its change events and every change must be covered.
inline Clustering clustering_from_string(const std::string& text, const SessionLog* session = nullptr) {
  Clustering c;
  for (const auto& [line, content] : record_lines(text)) {
    const json record = detail::parse_record(content, line);
    try {
      c.assign(detail::string_field(record, "changeId", line),
               detail::string_field(record, "clusterId", line));
    } catch (const ValidationError& e) {
      throw FormatError("line " + std::to_string(line) + ": " + e.what());
    }
  }
  if (session != nullptr) validate_clustering(c, *session);
  return c;
}

inline Clustering read_clustering(const std::filesystem::path& path, const SessionLog* session = nullptr) {
  try {
    return clustering_from_string(read_file(path), session);
  } catch (const Error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

inline void write_clustering(const Clustering& c, const std::filesystem::path& path) {
  write_file_atomically(path, clustering_to_string(c));
}

}  // namespace untangle
