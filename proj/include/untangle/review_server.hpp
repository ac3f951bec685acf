#pragma once

// HTTP endpoints for the review UI. One session per server; reads run
// concurrently, clustering submissions replace the whole document.

#include <cmath>
#include <filesystem>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>

#include "httplib.h"
#include "json.hpp"

#include "untangle/clusterer.hpp"
#include "untangle/error.hpp"
#include "untangle/event_model.hpp"
#include "untangle/model.hpp"
#include "untangle/session_io.hpp"
#include "untangle/unified_diff.hpp"
#include "untangle/voters.hpp"

namespace untangle {

inline json clustering_document(const Clustering& c) {
  json records = json::array();
  for (const auto& [change, cluster] : c.records()) records.push_back({{"changeId", change}, {"clusterId", cluster}});
  return json{{"records", std::move(records)}};
}

/// Inverse of clustering_document; checks the partition against `log`.
inline Clustering clustering_from_document(const json& doc, const SessionLog& log) {
  if (!doc.is_object() || !doc.contains("records") || !doc["records"].is_array())
    throw FormatError("expected an object with a 'records' array");
  Clustering c;
  std::size_t n = 0;
  for (const auto& r : doc["records"]) {
    ++n;
    c.assign(detail::string_field(r, "changeId", n), detail::string_field(r, "clusterId", n));
  }
  validate_clustering(c, log);
  return c;
}

inline json session_document(const SessionLog& log) {
  json records = json::array();
  for (const auto& entry : log.entries) {
    json r = to_record(entry);
    if (const auto* change = std::get_if<ChangeEvent>(&entry)) {
      r["diff"] = change_diff(*change);
      r["label"] = change->is_method() ? change->className + ">>" + change->selector : change->className;
    }
    records.push_back(std::move(r));
  }
  return json{{"developerId", log.developerId}, {"records", std::move(records)}};
}

class ReviewServer {
 public:
  // An empty `out` rejects submissions instead of persisting them.
  ReviewServer(SessionLog log, Model model, Clustering proposal, std::filesystem::path out, CutConfig cut = {})
      : log_(std::move(log)),
        model_(std::move(model)),
        clustering_(std::move(proposal)),
        out_(std::move(out)),
        cut_(cut),
        featurizer_(log_) {
    validate_clustering(clustering_, log_);
    featurizer_.warm();
    routes();
  }

  ReviewServer(const ReviewServer&) = delete;
  ReviewServer& operator=(const ReviewServer&) = delete;

  httplib::Server& http() { return server_; }

  /// Binds to `port` (0 picks a free one) and returns the bound port.
  int bind(const std::string& host, int port) {
    if (port == 0) return server_.bind_to_any_port(host);
    if (!server_.bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
    return port;
  }

  bool listen() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }

  Clustering current() const {
    std::shared_lock lock(mutex_);
    return clustering_;
  }

 private:
  static void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void fail(httplib::Response& res, int status, const std::string& message) {
    reply(res, status, json{{"error", message}});
  }

  void routes() {
    session_body_ = session_document(log_).dump();
    server_.Get("/api/session", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(session_body_, "application/json");
    });

    server_.Get("/api/clustering", [this](const httplib::Request&, httplib::Response& res) {
      std::shared_lock lock(mutex_);
      reply(res, 200, clustering_document(clustering_));
    });

    server_.Post("/api/clustering", [this](const httplib::Request& req, httplib::Response& res) {
      if (out_.empty()) return fail(res, 409, "server was started without an output path");
      Clustering submitted;
      try {
        submitted = clustering_from_document(json::parse(req.body), log_);
      } catch (const json::exception& e) {
        return fail(res, 400, std::string("malformed document: ") + e.what());
      } catch (const Error& e) {
        return fail(res, 400, e.what());
      }
      std::unique_lock lock(mutex_);
      try {
        write_clustering(submitted, out_);
      } catch (const Error& e) {
        return fail(res, 500, e.what());
      }
      clustering_ = std::move(submitted);
      reply(res, 200, json{{"saved", true}, {"clusters", clustering_.clusters().size()}});
    });

    server_.Get("/api/score", [this](const httplib::Request& req, httplib::Response& res) {
      if (!req.has_param("a") || !req.has_param("b")) return fail(res, 400, "parameters 'a' and 'b' are required");
      const std::string a = req.get_param_value("a");
      const std::string b = req.get_param_value("b");
      const auto pa = change_position(a);
      const auto pb = change_position(b);
      if (!pa) return fail(res, 404, "unknown change '" + a + "'");
      if (!pb) return fail(res, 404, "unknown change '" + b + "'");
      if (*pa == *pb) return fail(res, 400, "a and b must be different changes");
      const VoterVector v = featurizer_.compute_at(*pa, *pb);
      const double p = predict(model_, v);
      const bool within =
          std::fabs(featurizer_.change_at(*pa).timestamp - featurizer_.change_at(*pb).timestamp) < cut_.pairWindowSeconds;
      json voters = json::object();
      for (std::size_t i = 0; i < kVoterCount; ++i) voters[std::string(kVoters[i].name)] = v.values[i];
      reply(res, 200,
            json{{"a", a}, {"b", b}, {"probability", p}, {"withinWindow", within}, {"similarity", within ? p : 0.0},
                 {"voters", std::move(voters)}});
    });
  }

  std::optional<std::size_t> change_position(const std::string& id) const {
    const auto pos = featurizer_.position(id);
    if (!pos || !std::holds_alternative<ChangeEvent>(log_.entries[*pos])) return std::nullopt;
    return pos;
  }

  const SessionLog log_;
  const Model model_;
  Clustering clustering_;
  const std::filesystem::path out_;
  const CutConfig cut_;
  PairFeaturizer featurizer_;
  std::string session_body_;
  mutable std::shared_mutex mutex_;
  httplib::Server server_;
};

}  // namespace untangle
