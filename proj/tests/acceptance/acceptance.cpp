// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. argv[1] is the path of the untangle CLI binary.

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "untangle/review_server.hpp"
#include "untangle/untangle.hpp"

extern char** environ;

namespace fs = std::filesystem;
using namespace untangle;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream out;
  out.precision(digits);
  out << std::fixed << v;
  return out.str();
}

bool run_criterion(int id, const std::string& title, double limit_seconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs < limit_seconds;
  const bool pass = o.pass && in_time;
  std::cout << (pass ? "PASS" : "FAIL") << " AC" << id << " " << title << ": " << o.detail << " [" << fmt(secs, 2)
            << " s, limit " << limit_seconds << " s" << (in_time ? "" : ", TOO SLOW") << "]" << std::endl;
  return pass;
}

// Well-separated generator settings: no shared classes, inter-task gaps at
// least 100x the longest intra-task gap.
SynthConfig separated(std::uint64_t seed, std::size_t tasks) {
  SynthConfig cfg;
  cfg.seed = seed;
  cfg.numTasks = tasks;
  cfg.classOverlap = 0;
  cfg.intraTaskGapSeconds = {10, 60};
  cfg.interTaskGapSeconds = {6000, 20000};
  return cfg;
}

Trainer forest_trainer(std::size_t trees) {
  ForestConfig cfg;
  cfg.trees = trees;
  return make_trainer(Family::RandomForest, cfg);
}

// Sessions from consecutive seeds until `min_changes` changes are covered.
std::vector<SyntheticSession> sessions_with_changes(std::uint64_t first_seed, std::size_t min_changes) {
  std::vector<SyntheticSession> out;
  std::size_t changes = 0;
  for (std::uint64_t seed = first_seed; changes < min_changes; ++seed) {
    out.push_back(generate_synthetic_session(separated(seed, 3)));
    changes += out.back().log.change_count();
  }
  return out;
}

Dataset pairs_of(const std::vector<SyntheticSession>& sessions) {
  std::vector<Dataset> parts;
  for (const auto& s : sessions) parts.push_back(build_pairs(s.log, s.truth));
  return concat(parts);
}

// ---- AC1 ----

Outcome figure_instance() {
  const fs::path dir = fs::path(UNTANGLE_DATA_DIR) / "figure_instance";
  const Clustering computed = read_clustering(dir / "computed.jsonl");
  const Clustering expected = read_clustering(dir / "expected.jsonl");
  const MatchResult r = match_clusterings(computed, expected);
  const bool ok = r.totalJaccard == 3.5 && std::fabs(r.successRate - 5.0 / 6.0) <= 1e-12;
  return {ok, "totalJaccard " + fmt(r.totalJaccard, 12) + ", successRate " + fmt(r.successRate, 12)};
}

// ---- AC2 ----

// Jaccard values as integers over the common denominator lcm(1..30), so
// sums over any matching compare exactly.
constexpr std::int64_t kCommonDenominator = 2329089562800LL;

std::int64_t exact_jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::int64_t common = 0;
  for (const auto& x : a) common += b.contains(x) ? 1 : 0;
  const std::int64_t all = static_cast<std::int64_t>(a.size() + b.size()) - common;
  return all == 0 ? 0 : common * (kCommonDenominator / all);
}

Clustering random_clustering(Rng& rng, std::size_t changes, std::size_t max_clusters, const std::string& prefix) {
  const std::size_t k = 1 + rng.below(max_clusters);
  Clustering c;
  for (std::size_t i = 0; i < changes; ++i)
    c.assign("c" + std::to_string(i), prefix + std::to_string(rng.below(k)));
  return c;
}

Outcome assignment_oracle() {
  Rng rng(20240501);
  std::size_t agree = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(30);
    const Clustering computed = random_clustering(rng, n, 6, "C");
    const Clustering expected = random_clustering(rng, n, 6, "E");
    const MatchResult r = match_clusterings(computed, expected);

    const std::size_t k = std::max(computed.clusters().size(), expected.clusters().size());
    const PaddedClusters c = padded_clusters(computed, k);
    const PaddedClusters e = padded_clusters(expected, k);
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::int64_t best = -1;
    do {
      std::int64_t sum = 0;
      for (std::size_t i = 0; i < k; ++i) sum += exact_jaccard(c.members[i], e.members[perm[i]]);
      best = std::max(best, sum);
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::map<std::string, std::size_t> ci, ei;
    for (std::size_t i = 0; i < k; ++i) ci[c.ids[i]] = i, ei[e.ids[i]] = i;
    std::int64_t chosen = 0;
    for (const auto& [a, b] : r.pairs) chosen += exact_jaccard(c.members[ci.at(a)], e.members[ei.at(b)]);
    const double diff = std::fabs(r.totalJaccard - static_cast<double>(best) / static_cast<double>(kCommonDenominator));
    worst = std::max(worst, diff);
    if (chosen == best && diff <= 1e-12) ++agree;
  }
  return {agree == 200, std::to_string(agree) + "/200 exact optima, max |totalJaccard - optimum| " + fmt(worst, 15)};
}

// ---- AC3 ----

Outcome auc_oracle() {
  Rng rng(77);
  std::size_t agree = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(499);
    const bool coarse = rng.bernoulli(0.5);  // many ties
    std::vector<double> scores(n);
    std::vector<unsigned char> labels(n);
    const double p = rng.uniform(0.05, 0.95);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = coarse ? static_cast<double>(rng.below(6)) / 5.0 : rng.uniform(0.0, 1.0);
      labels[i] = rng.bernoulli(p) ? 1 : 0;
    }
    labels[0] = 1;
    labels[1] = 0;
    const auto auc = rank_auc(scores, labels);
    double wins = 0.0, pairs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!labels[i]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (labels[j]) continue;
        pairs += 1.0;
        wins += scores[i] > scores[j] ? 1.0 : scores[i] == scores[j] ? 0.5 : 0.0;
      }
    }
    const double oracle = wins / pairs;
    if (!auc) continue;
    const double diff = std::fabs(*auc - oracle);
    worst = std::max(worst, diff);
    if (diff <= 1e-12) ++agree;
  }
  return {agree == 200, std::to_string(agree) + "/200 within 1e-12, max diff " + fmt(worst, 15)};
}

// ---- AC4 ----

Outcome separability() {
  const auto train_sessions = sessions_with_changes(1000, 200);
  std::size_t train_changes = 0;
  for (const auto& s : train_sessions) train_changes += s.log.change_count();
  const Dataset train = rebalance(pairs_of(train_sessions), 1);
  const Model model = forest_trainer(500)(train, 42);

  std::vector<SyntheticSession> held_out;
  for (std::uint64_t seed = 5000; seed < 5020; ++seed) held_out.push_back(generate_synthetic_session(separated(seed, 3)));
  const Dataset raw = pairs_of(held_out);
  const Dataset balanced = rebalance(raw, 2);
  const double acc_balanced = accuracy_on(model, balanced);
  const double acc_raw = accuracy_on(model, raw);
  return {acc_balanced >= 0.95,
          "trained on " + std::to_string(train_changes) + " changes; held-out accuracy " + fmt(acc_balanced) +
              " (2:1 rebalanced, " + std::to_string(balanced.size()) + " pairs), " + fmt(acc_raw) + " (all " +
              std::to_string(raw.size()) + " pairs)"};
}

// ---- AC5 ----

Outcome classifier_ordering() {
  std::vector<SyntheticSession> sessions;
  for (std::uint64_t seed = 300; seed < 312; ++seed) {
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.numTasks = 3;
    cfg.classOverlap = 1;
    sessions.push_back(generate_synthetic_session(cfg));
  }
  Dataset ds = pairs_of(sessions);
  const std::size_t td = ds.feature_index("timeDifference");
  const std::size_t sc = ds.feature_index("sameClass");
  std::vector<double> times;
  for (const auto& s : ds.samples) times.push_back(s.features[td]);
  std::nth_element(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(times.size() / 2), times.end());
  const double median = times[times.size() / 2];
  for (auto& s : ds.samples) s.label = (s.features[sc] == 1.0) != (s.features[td] < median);

  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(5);
  rng.shuffle(std::span<std::size_t>(order));
  const std::size_t n_train = order.size() * 7 / 10;
  std::vector<std::size_t> tr(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> te(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  const Dataset train = ds.subset(tr);
  const Dataset test = ds.subset(te);

  const double forest = evaluate_metrics(forest_trainer(500)(train, 42), test).auc.value();
  const double logistic = evaluate_metrics(make_trainer(Family::Logistic)(train, 42), test).auc.value();
  const double bayes = evaluate_metrics(make_trainer(Family::NaiveBayes)(train, 42), test).auc.value();
  return {forest > logistic && forest > bayes,
          "AUC forest " + fmt(forest) + ", logistic " + fmt(logistic) + ", naive Bayes " + fmt(bayes) + " (" +
              std::to_string(ds.size()) + " pairs)"};
}

// ---- AC6 ----

Outcome importance_sanity() {
  std::vector<SyntheticSession> sessions;
  for (std::uint64_t seed = 600; seed < 606; ++seed) {
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.classOverlap = 1;
    sessions.push_back(generate_synthetic_session(cfg));
  }
  Dataset ds = rebalance(pairs_of(sessions), 3);
  const std::size_t sc = ds.feature_index("sameClass");
  ds.featureNames.push_back("noise");
  Rng rng(66);
  for (auto& s : ds.samples) {
    s.label = s.features[sc] == 1.0;
    s.features.push_back(rng.uniform(0.0, 1000.0));
  }
  const ImportanceReport report = permutation_importance(ds, forest_trainer(500), 50, 42);
  const auto find = [&](const std::string& name) {
    return *std::find_if(report.ranking.begin(), report.ranking.end(),
                         [&](const VoterImportance& v) { return v.name == name; });
  };
  const VoterImportance determining = find("sameClass");
  const VoterImportance noise = find("noise");
  const bool ok = determining.timesRankedFirst >= 45 && std::fabs(noise.meanDrop) <= 0.02;
  return {ok, "sameClass ranked first in " + std::to_string(determining.timesRankedFirst) +
                  "/50 runs (mean drop " + fmt(determining.meanDrop) + "), noise mean drop " + fmt(noise.meanDrop, 5) +
                  " (" + std::to_string(ds.size()) + " pairs)"};
}

// ---- AC7 ----

// Independent voter values; the label is the majority of sameClass,
// short timeDifference and short numberOfEntriesDistance.
Dataset three_signal_dataset(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Dataset ds;
  ds.featureNames = all_voter_names();
  const std::size_t td = ds.feature_index("timeDifference");
  const std::size_t ed = ds.feature_index("numberOfEntriesDistance");
  const std::size_t sc = ds.feature_index("sameClass");
  for (std::size_t i = 0; i < n; ++i) {
    PairSample s;
    s.idA = "a" + std::to_string(i);
    s.idB = "b" + std::to_string(i);
    s.features.resize(kVoterCount);
    for (std::size_t j = 0; j < kVoterCount; ++j) {
      switch (kVoters[j].type) {
        case FeatureType::Boolean: s.features[j] = rng.bernoulli(0.5) ? 1.0 : 0.0; break;
        case FeatureType::Nominal: s.features[j] = static_cast<double>(rng.below(3)); break;
        case FeatureType::Numeric: s.features[j] = std::floor(rng.uniform(0.0, 50.0)); break;
      }
    }
    s.features[td] = std::floor(rng.uniform(0.0, 20000.0));
    s.features[ed] = std::floor(rng.uniform(0.0, 100.0));
    const int votes = (s.features[sc] == 1.0) + (s.features[td] < 10000.0) + (s.features[ed] < 50.0);
    s.label = votes >= 2;
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

Outcome trimming() {
  const Dataset ds = three_signal_dataset(800, 7);
  const Trainer trainer = forest_trainer(500);
  const ImportanceReport report = permutation_importance(ds, trainer, 50, 42);
  std::vector<std::string> ranking;
  for (const auto& v : report.ranking) ranking.push_back(v.name);
  TrimOptions opt;
  opt.seed = 42;
  const TrimResult r = trim_voters(ds, ranking, trainer, opt);
  const std::vector<std::string> expected{"numberOfEntriesDistance", "timeDifference", "sameClass"};
  std::vector<std::string> want = expected, got = r.subset;
  std::sort(want.begin(), want.end());
  std::sort(got.begin(), got.end());
  std::string names;
  for (const auto& s : r.subset) names += (names.empty() ? "" : ",") + s;
  const bool ok = got == want && r.subsetAccuracy >= r.fullAccuracy - 0.03;
  return {ok, "subset {" + names + "}, CV accuracy full " + fmt(r.fullAccuracy) + " trimmed " + fmt(r.subsetAccuracy)};
}

// ---- AC8 ----

Outcome end_to_end() {
  const auto train_sessions = sessions_with_changes(8000, 400);
  const Dataset full = rebalance(pairs_of(train_sessions), 1);
  const Trainer trainer = forest_trainer(500);
  const ImportanceReport report = permutation_importance(full, trainer, 10, 42);
  std::vector<std::string> ranking;
  for (const auto& v : report.ranking) ranking.push_back(v.name);
  TrimOptions opt;
  opt.seed = 42;
  opt.folds = 5;
  const TrimResult trimmed = trim_voters(full, ranking, trainer, opt);
  const Model model = trainer(select_features(full, trimmed.subset), 42);

  Rng rng(88);
  std::vector<double> rates;
  for (std::uint64_t seed = 9000; seed < 9050; ++seed) {
    const auto s = generate_synthetic_session(separated(seed, 2 + rng.below(4)));
    rates.push_back(match_clusterings(untangle::untangle(s.log, model), s.truth).successRate);
  }
  std::sort(rates.begin(), rates.end());
  const double median = (rates[24] + rates[25]) / 2.0;
  const double mean = std::accumulate(rates.begin(), rates.end(), 0.0) / static_cast<double>(rates.size());
  std::string names;
  for (const auto& s : trimmed.subset) names += (names.empty() ? "" : ",") + s;
  return {median >= 0.85, "median successRate " + fmt(median) + ", mean " + fmt(mean) + ", minimum " + fmt(rates[0]) +
                              " over 50 sessions; trimmed voters {" + names + "}"};
}

// ---- AC9 ----

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string quoted(const std::string& s) { return "'" + s + "'"; }

struct CliRun {
  std::map<std::string, std::string> artifacts;  // name -> bytes
  std::string failure;
};

// Starts `serve`, waits for its banner, and exercises every endpoint.
bool exercise_server(const std::string& cli, const fs::path& dir, CliRun& run) {
  const std::string banner = (dir / "serve.stdout").string();
  std::vector<std::string> args{cli,     "serve",   "--session", (dir / "s2.jsonl").string(), "--model",
                                (dir / "model.json").string(), "--out", (dir / "reviewed.jsonl").string(),
                                "--port", "0"};
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, 1, banner.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  pid_t pid = 0;
  const int rc = posix_spawn(&pid, cli.c_str(), &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    run.failure = "cannot start serve";
    return false;
  }
  int port = 0;
  for (int i = 0; i < 600 && port == 0; ++i) {
    const std::string text = slurp(banner);
    const auto at = text.rfind(':');
    if (text.find("serving on") != std::string::npos && at != std::string::npos && text.back() == '\n')
      port = std::stoi(text.substr(at + 1));
    else
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  bool ok = port != 0;
  if (ok) {
    httplib::Client client("127.0.0.1", port);
    auto get = [&](const std::string& path, const std::string& name) {
      auto res = client.Get(path);
      if (!res || res->status != 200) return false;
      run.artifacts[name] = res->body;
      return true;
    };
    const SessionLog log = read_session(dir / "s2.jsonl");
    const auto changes = log.changes();
    ok = get("/api/session", "GET /api/session") && get("/api/clustering", "GET /api/clustering") &&
         get("/api/score?a=" + changes.front()->id + "&b=" + changes.back()->id, "GET /api/score");
    if (ok) {
      auto res = client.Post("/api/clustering", run.artifacts["GET /api/clustering"], "application/json");
      ok = res && res->status == 200;
      if (ok) run.artifacts["POST /api/clustering"] = res->body;
    }
    if (!ok) run.failure = "serve endpoint failed";
  } else {
    run.failure = "serve did not report a port";
  }
  kill(pid, SIGTERM);
  int status = 0;
  waitpid(pid, &status, 0);
  run.artifacts["serve stdout"] = slurp(banner);
  if (ok) run.artifacts["reviewed.jsonl"] = slurp(dir / "reviewed.jsonl");
  return ok;
}

CliRun run_cli_pipeline(const std::string& cli, const fs::path& dir) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string d = dir.string() + "/";
  // name, arguments, files written
  const std::vector<std::tuple<std::string, std::string, std::vector<std::string>>> steps{
      {"simulate-1", "simulate --seed 7 --developer alice --id-prefix a --out " + d + "s1.jsonl --truth " + d + "t1.jsonl",
       {"s1.jsonl", "t1.jsonl"}},
      {"simulate-2", "simulate --seed 8 --developer bob --id-prefix b --tasks 4 --out " + d + "s2.jsonl --truth " + d +
                         "t2.jsonl",
       {"s2.jsonl", "t2.jsonl"}},
      {"featurize", "featurize --session " + d + "s1.jsonl --truth " + d + "t1.jsonl --out " + d + "d1.jsonl",
       {"d1.jsonl"}},
      {"train", "train --dataset " + d + "d1.jsonl --trees 40 --seed 3 --out " + d + "model.json", {"model.json"}},
      {"cv", "cv --dataset " + d + "d1.jsonl --trees 20 --folds 3 --seed 3 --out " + d + "cv.json", {"cv.json"}},
      {"importance", "importance --dataset " + d + "d1.jsonl --trees 20 --runs 3 --seed 3 --out " + d + "rank.jsonl",
       {"rank.jsonl"}},
      {"trim", "trim --dataset " + d + "d1.jsonl --ranking " + d + "rank.jsonl --trees 20 --folds 3 --seed 3 --out " + d +
                   "trimmed.json",
       {"trimmed.json"}},
      {"untangle", "untangle --session " + d + "s2.jsonl --model " + d + "model.json --out " + d + "c2.jsonl",
       {"c2.jsonl"}},
      {"evaluate", "evaluate --computed " + d + "c2.jsonl --truth " + d + "t2.jsonl --out " + d + "eval.jsonl",
       {"eval.jsonl"}},
      {"experiment", "experiment --manifest " + d + "manifest.jsonl --mode combined --trees 20 --folds 3 --seed 3 --out " +
                         d + "experiment.jsonl",
       {"experiment.jsonl"}},
  };
  CliRun run;
  {
    std::ofstream m(dir / "manifest.jsonl");
    m << R"({"session":"s1.jsonl","truth":"t1.jsonl"})" << "\n" << R"({"session":"s2.jsonl","truth":"t2.jsonl"})" << "\n";
  }
  for (const auto& [name, args, files] : steps) {
    const fs::path out = dir / (name + ".stdout");
    const std::string cmd = quoted(cli) + " " + args + " > " + quoted(out.string()) + " 2>&1";
    if (std::system(cmd.c_str()) != 0) {
      run.failure = name + " failed: " + slurp(out);
      return run;
    }
    run.artifacts[name + " stdout"] = slurp(out);
    for (const auto& f : files) run.artifacts[f] = slurp(dir / f);
  }
  exercise_server(cli, dir, run);
  return run;
}

Outcome determinism(const std::string& cli) {
  const fs::path base = fs::temp_directory_path() / ("untangle-acceptance-" + std::to_string(getpid()));
  const CliRun a = run_cli_pipeline(cli, base / "run1");
  const CliRun b = run_cli_pipeline(cli, base / "run2");
  fs::remove_all(base);
  if (!a.failure.empty()) return {false, a.failure};
  if (!b.failure.empty()) return {false, b.failure};
  std::vector<std::string> differing;
  for (const auto& [name, bytes] : a.artifacts) {
    auto it = b.artifacts.find(name);
    // the serve banner carries the ephemeral port
    if (name == "serve stdout") continue;
    if (it == b.artifacts.end() || it->second != bytes || bytes.empty()) differing.push_back(name);
  }
  std::string diff;
  for (const auto& n : differing) diff += " " + n;
  return {differing.empty() && a.artifacts.size() == b.artifacts.size(),
          std::to_string(a.artifacts.size() - 1) + " outputs compared across 10 subcommands" +
              (differing.empty() ? ", all byte-identical" : "; differing:" + diff)};
}

// ---- AC10 ----

bool levels_monotone(const Dendrogram& d) {
  for (std::size_t i = d.leaves; i < d.nodes.size(); ++i) {
    for (int child : {d.nodes[i].left, d.nodes[i].right}) {
      const auto c = static_cast<std::size_t>(child);
      if (!d.is_leaf(c) && d.nodes[c].level < d.nodes[i].level) return false;
    }
  }
  return true;
}

Outcome dendrogram_properties() {
  Rng rng(1010);
  std::size_t bad_monotone = 0, bad_cut = 0, bad_partition = 0, with_candidate = 0;
  const CutConfig cfg;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.below(12);
    const int style = static_cast<int>(rng.below(3));
    SimilarityMatrix sim(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        double v = rng.uniform(0.0, 1.0);
        if (style == 1) v = static_cast<double>(rng.below(5)) / 4.0;     // ties
        if (style == 2) v = rng.bernoulli(0.5) ? rng.uniform(0.8, 1.0) : rng.uniform(0.0, 0.1);
        sim.set(i, j, v);
      }
    std::vector<ChangeEvent> events(n);
    std::vector<const ChangeEvent*> changes;
    for (std::size_t i = 0; i < n; ++i) {
      events[i].id = "c" + std::to_string(i);
      changes.push_back(&events[i]);
    }
    const UntangleResult r = untangle_similarity(changes, sim, cfg);
    if (!levels_monotone(r.dendrogram)) ++bad_monotone;
    const auto levels = r.dendrogram.merge_levels();
    if (std::any_of(levels.begin(), levels.end(), [&](double l) { return l < cfg.lowSimilarityBound; })) {
      ++with_candidate;
      if (!(r.threshold < cfg.lowSimilarityBound)) ++bad_cut;
    }
    std::set<std::string> seen;
    bool partition = r.clustering.size() == n;
    for (const auto& c : r.clustering.clusters()) {
      partition = partition && !c.members.empty();
      for (const auto& m : c.members) partition = partition && seen.insert(m).second;
    }
    if (!partition || seen.size() != n) ++bad_partition;
  }
  const bool ok = bad_monotone == 0 && bad_cut == 0 && bad_partition == 0;
  return {ok, "500 matrices: " + std::to_string(bad_monotone) + " non-monotone, " + std::to_string(bad_cut) + "/" +
                  std::to_string(with_candidate) + " cuts at or above the bound, " + std::to_string(bad_partition) +
                  " invalid partitions"};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path to untangle CLI> [criterion ...]\n";
    return 2;
  }
  const std::string cli = fs::absolute(argv[1]).string();
  std::set<int> only;
  for (int i = 2; i < argc; ++i) only.insert(std::atoi(argv[i]));
  const std::vector<std::tuple<int, std::string, double, std::function<Outcome()>>> criteria{
      {1, "figure example", 1, figure_instance},
      {2, "assignment oracle", 30, assignment_oracle},
      {3, "AUC oracle", 30, auc_oracle},
      {4, "separability", 300, separability},
      {5, "classifier ordering", 300, classifier_ordering},
      {6, "importance sanity", 600, importance_sanity},
      {7, "trimming", 600, trimming},
      {8, "end-to-end untangling", 600, end_to_end},
      {9, "determinism", 120, [&] { return determinism(cli); }},
      {10, "dendrogram properties", 60, dendrogram_properties},
  };
  int failures = 0;
  for (const auto& [id, title, limit, body] : criteria) {
    if (!only.empty() && !only.contains(id)) continue;
    if (!run_criterion(id, title, limit, body)) ++failures;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
