#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "untangle/dataset.hpp"
#include "untangle/error.hpp"
#include "untangle/models/logistic.hpp"
#include "untangle/models/naive_bayes.hpp"
#include "untangle/models/random_forest.hpp"
#include "untangle/session_io.hpp"
#include "untangle/voters.hpp"

namespace untangle {

enum class Family { Logistic, NaiveBayes, RandomForest };

inline std::string_view to_string(Family f) {
  switch (f) {
    case Family::Logistic: return "logreg";
    case Family::NaiveBayes: return "nb";
    case Family::RandomForest: return "forest";
  }
  return "?";
}

inline Family parse_family(std::string_view text) {
  if (text == "logreg") return Family::Logistic;
  if (text == "nb") return Family::NaiveBayes;
  if (text == "forest") return Family::RandomForest;
  throw Error("unknown classifier family '" + std::string(text) + "'");
}

/// A trained pair classifier together with the feature columns it reads.
struct Model {
  std::vector<std::string> featureNames;
  std::variant<LogisticModel, NaiveBayesModel, RandomForestModel> params;

  Family family() const { return static_cast<Family>(params.index()); }
  bool trained_on_voter_subset() const { return featureNames != all_voter_names(); }

  bool operator==(const Model&) const = default;
};

inline double predict(const Model& m, std::span<const double> x) {
  if (x.size() != m.featureNames.size())
    throw Error("feature arity mismatch: model expects " + std::to_string(m.featureNames.size()) +
                ", got " + std::to_string(x.size()));
  return std::visit([&](const auto& p) { return predict(p, x); }, m.params);
}

/// Picks the model's columns out of a full voter vector.
inline double predict(const Model& m, const VoterVector& v) {
  std::vector<double> x;
  x.reserve(m.featureNames.size());
  for (const auto& name : m.featureNames) {
    auto idx = voter_index(name);
    if (!idx) throw Error("model feature '" + name + "' is not a voter");
    x.push_back(v.values[*idx]);
  }
  return predict(m, std::span<const double>(x));
}

// Trainers take (dataset, seed); non-random families ignore the seed.
using Trainer = std::function<Model(const Dataset&, std::uint64_t)>;

inline Trainer make_trainer(Family family, const ForestConfig& forest = {}, const LogisticHyper& logistic = {}) {
  switch (family) {
    case Family::Logistic:
      return [logistic](const Dataset& ds, std::uint64_t) {
        return Model{ds.featureNames, train_logistic(ds, logistic)};
      };
    case Family::NaiveBayes:
      return [](const Dataset& ds, std::uint64_t) { return Model{ds.featureNames, train_naive_bayes(ds)}; };
    case Family::RandomForest:
      return [forest](const Dataset& ds, std::uint64_t seed) {
        return Model{ds.featureNames, train_random_forest(ds, forest, seed)};
      };
  }
  throw Error("unknown classifier family");
}

namespace detail {

inline json tree_node_to_json(const DecisionTree& t, std::size_t at) {
  const TreeNode& n = t.nodes[at];
  if (n.is_leaf()) return json{{"leaf", n.probability}};
  return json{{"feature", n.feature},
              {"threshold", n.threshold},
              {"left", tree_node_to_json(t, static_cast<std::size_t>(n.left))},
              {"right", tree_node_to_json(t, static_cast<std::size_t>(n.right))}};
}

inline void tree_node_from_json(const json& j, DecisionTree& t, std::size_t at, std::size_t num_features) {
  if (j.contains("leaf")) {
    t.nodes[at].probability = j.at("leaf").get<double>();
    return;
  }
  const int feature = j.at("feature").get<int>();
  if (feature < 0 || static_cast<std::size_t>(feature) >= num_features)
    throw FormatError("tree node references feature " + std::to_string(feature));
  const int left = static_cast<int>(t.nodes.size());
  t.nodes.emplace_back();
  t.nodes.emplace_back();
  t.nodes[at].feature = feature;
  t.nodes[at].threshold = j.at("threshold").get<double>();
  t.nodes[at].left = left;
  t.nodes[at].right = left + 1;
  tree_node_from_json(j.at("left"), t, static_cast<std::size_t>(left), num_features);
  tree_node_from_json(j.at("right"), t, static_cast<std::size_t>(left + 1), num_features);
}

inline std::string_view type_tag(FeatureType t) {
  switch (t) {
    case FeatureType::Boolean: return "bernoulli";
    case FeatureType::Nominal: return "categorical";
    case FeatureType::Numeric: return "gaussian";
  }
  return "?";
}

}  // namespace detail

/// Self-describing document: family tag, feature names and parameters.
/// Tree nodes are nested records.
inline json model_to_json(const Model& m) {
  json params;
  if (const auto* lr = std::get_if<LogisticModel>(&m.params)) {
    params = {{"weights", lr->weights}, {"bias", lr->bias}, {"mean", lr->mean}, {"stddev", lr->stddev}};
  } else if (const auto* nb = std::get_if<NaiveBayesModel>(&m.params)) {
    json features = json::array();
    for (const auto& f : nb->features) {
      json jf{{"kind", std::string(detail::type_tag(f.type))}};
      switch (f.type) {
        case FeatureType::Boolean: jf["pOne"] = f.pOne; break;
        case FeatureType::Nominal: jf["levels"] = f.levels; break;
        case FeatureType::Numeric: jf["mean"] = f.mean; jf["variance"] = f.variance; break;
      }
      features.push_back(std::move(jf));
    }
    params = {{"prior", nb->prior}, {"features", std::move(features)}};
  } else {
    const auto& rf = std::get<RandomForestModel>(m.params);
    json trees = json::array();
    for (const auto& t : rf.trees) trees.push_back({{"seed", t.seed}, {"root", detail::tree_node_to_json(t, 0)}});
    params = {{"trees", std::move(trees)}};
  }
  return json{{"family", std::string(to_string(m.family()))},
              {"featureNames", m.featureNames},
              {"trainedOnVoterSubset", m.trained_on_voter_subset()},
              {"params", std::move(params)}};
}

inline Model model_from_json(const json& j) {
  try {
    Model m;
    m.featureNames = j.at("featureNames").get<std::vector<std::string>>();
    const std::size_t d = m.featureNames.size();
    const json& p = j.at("params");
    const Family family = parse_family(j.at("family").get<std::string>());
    auto check = [&](std::size_t got, const char* what) {
      if (got != d) throw FormatError(std::string("model field '") + what + "' has wrong arity");
    };
    switch (family) {
      case Family::Logistic: {
        LogisticModel lr;
        lr.weights = p.at("weights").get<std::vector<double>>();
        lr.bias = p.at("bias").get<double>();
        lr.mean = p.at("mean").get<std::vector<double>>();
        lr.stddev = p.at("stddev").get<std::vector<double>>();
        check(lr.weights.size(), "weights");
        check(lr.mean.size(), "mean");
        check(lr.stddev.size(), "stddev");
        m.params = std::move(lr);
        break;
      }
      case Family::NaiveBayes: {
        NaiveBayesModel nb;
        nb.prior = p.at("prior").get<std::array<double, 2>>();
        for (const auto& jf : p.at("features")) {
          NaiveBayesFeature f;
          const std::string kind = jf.at("kind").get<std::string>();
          if (kind == "bernoulli") {
            f.type = FeatureType::Boolean;
            f.pOne = jf.at("pOne").get<std::array<double, 2>>();
          } else if (kind == "categorical") {
            f.type = FeatureType::Nominal;
            f.levels = jf.at("levels").get<std::array<std::vector<double>, 2>>();
            for (const auto& lv : f.levels)
              if (lv.size() != kNominalLevels) throw FormatError("categorical feature needs 3 levels");
          } else if (kind == "gaussian") {
            f.type = FeatureType::Numeric;
            f.mean = jf.at("mean").get<std::array<double, 2>>();
            f.variance = jf.at("variance").get<std::array<double, 2>>();
          } else {
            throw FormatError("unknown naive Bayes feature kind '" + kind + "'");
          }
          nb.features.push_back(std::move(f));
        }
        check(nb.features.size(), "features");
        m.params = std::move(nb);
        break;
      }
      case Family::RandomForest: {
        RandomForestModel rf;
        for (const auto& jt : p.at("trees")) {
          DecisionTree t;
          t.seed = jt.at("seed").get<std::uint64_t>();
          t.nodes.emplace_back();
          detail::tree_node_from_json(jt.at("root"), t, 0, d);
          rf.trees.push_back(std::move(t));
        }
        m.params = std::move(rf);
        break;
      }
    }
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed model document: ") + e.what());
  }
}

inline std::string model_to_string(const Model& m) { return model_to_json(m).dump() + "\n"; }

inline Model model_from_string(const std::string& text) {
  try {
    return model_from_json(json::parse(text));
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("malformed model document: ") + e.what());
  }
}

inline Model read_model(const std::filesystem::path& path) {
  try {
    return model_from_string(read_file(path));
  } catch (const Error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

inline void write_model(const Model& m, const std::filesystem::path& path) {
  write_file_atomically(path, model_to_string(m));
}

}  // namespace untangle
