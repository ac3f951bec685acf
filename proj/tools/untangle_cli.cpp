// untangle: command-line front end for the untangling pipeline.
//
//   simulate -> featurize -> train -> untangle -> evaluate
//
// plus cv, importance, trim, experiment and serve. Every output file is
// written through a temporary and renamed, so failures leave no partial
// files behind.

#include <csignal>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "untangle/review_server.hpp"
#include "untangle/untangle.hpp"

namespace fs = std::filesystem;
using namespace untangle;

namespace {

constexpr std::uint64_t kDefaultSeed = 42;

struct Options {
  std::uint64_t seed = kDefaultSeed;
  std::string session, truth, model, dataset, computed, ranking, manifest, clustering, out;
  std::string classifier = "forest";
  std::size_t trees = 500;
  std::size_t varsPerSplit = 5;
  std::size_t threads = 1;
  std::size_t folds = 10;
  std::size_t runs = 50;
  double lowSimBound = 0.25;
  double pairWindowSecs = kPairWindowSeconds;
  double maxAccLoss = 0.03;
  bool noRebalance = false;
  std::string mode = "intradev";
  std::string host = "127.0.0.1";
  int port = 8080;
  SynthConfig synth;
};

Trainer trainer_for(const Options& o) {
  ForestConfig forest;
  forest.trees = o.trees;
  forest.varsPerSplit = o.varsPerSplit;
  forest.threads = o.threads;
  return make_trainer(parse_family(o.classifier), forest);
}

CutConfig cut_for(const Options& o) { return CutConfig{o.lowSimBound, o.pairWindowSecs}; }

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw Error(std::string("missing required flag ") + flag);
}

std::string dump_lines(const std::vector<json>& rows) {
  std::string out;
  for (const auto& r : rows) out += r.dump() + "\n";
  return out;
}

int cmd_simulate(const Options& o) {
  require(o.out, "--out");
  require(o.truth, "--truth");
  SynthConfig cfg = o.synth;
  cfg.seed = o.seed;
  const auto s = generate_synthetic_session(cfg);
  write_session(s.log, o.out);
  write_clustering(s.truth, o.truth);
  std::cout << "simulated " << s.log.change_count() << " changes in " << s.truth.clusters().size() << " tasks\n";
  return 0;
}

int cmd_featurize(const Options& o) {
  require(o.session, "--session");
  require(o.truth, "--truth");
  require(o.out, "--out");
  const SessionLog log = read_session(o.session);
  const Clustering truth = read_clustering(o.truth, &log);
  const Dataset ds = build_pairs(log, truth, o.pairWindowSecs);
  write_dataset(ds, o.out);
  std::cout << ds.size() << " pairs, " << ds.positives() << " same-task\n";
  return 0;
}

int cmd_train(const Options& o) {
  require(o.dataset, "--dataset");
  require(o.out, "--out");
  Dataset ds = read_dataset(o.dataset);
  if (!o.noRebalance) ds = rebalance(ds, derive_seed(o.seed, seed_stream::kRebalance, 0));
  const Model m = trainer_for(o)(ds, derive_seed(o.seed, seed_stream::kTrain, 0));
  write_model(m, o.out);
  std::cout << "trained " << to_string(m.family()) << " on " << ds.size() << " pairs\n";
  return 0;
}

int cmd_cv(const Options& o) {
  require(o.dataset, "--dataset");
  require(o.out, "--out");
  const Dataset ds = read_dataset(o.dataset);
  const auto cv = cross_validate(ds, o.folds, trainer_for(o), o.seed);
  json folds = json::array();
  for (const auto& f : cv.folds) folds.push_back(metrics_to_json(f));
  const json report{{"classifier", o.classifier}, {"folds", o.folds}, {"mean", metrics_to_json(cv.mean)},
                    {"perFold", std::move(folds)}};
  write_file_atomically(o.out, report.dump() + "\n");
  std::cout << "mean accuracy " << cv.mean.acc << "\n";
  return 0;
}

int cmd_importance(const Options& o) {
  require(o.dataset, "--dataset");
  require(o.out, "--out");
  const Dataset ds = read_dataset(o.dataset);
  const auto report = permutation_importance(ds, trainer_for(o), o.runs, o.seed);
  std::vector<json> rows;
  for (std::size_t rank = 0; rank < report.ranking.size(); ++rank) {
    const auto& v = report.ranking[rank];
    rows.push_back({{"rank", rank + 1}, {"voter", v.name}, {"meanDrop", v.meanDrop},
                    {"timesRankedFirst", v.timesRankedFirst}, {"runs", o.runs}});
  }
  write_file_atomically(o.out, dump_lines(rows));
  for (const auto& v : report.ranking) std::cout << v.name << " " << v.meanDrop << "\n";
  return 0;
}

std::vector<std::string> read_ranking(const fs::path& path) {
  std::vector<std::string> names;
  for (const auto& [line, content] : record_lines(read_file(path))) {
    names.push_back(detail::string_field(detail::parse_record(content, line), "voter", line));
  }
  return names;
}

int cmd_trim(const Options& o) {
  require(o.dataset, "--dataset");
  require(o.ranking, "--ranking");
  require(o.out, "--out");
  const Dataset ds = read_dataset(o.dataset);
  const auto trainer = trainer_for(o);
  TrimOptions opt;
  opt.maxAccLoss = o.maxAccLoss;
  opt.folds = o.folds;
  opt.seed = o.seed;
  const TrimResult r = trim_voters(ds, read_ranking(o.ranking), trainer, opt);
  Dataset subset = select_features(ds, r.subset);
  if (!o.noRebalance) subset = rebalance(subset, derive_seed(o.seed, seed_stream::kRebalance, 0));
  write_model(trainer(subset, derive_seed(o.seed, seed_stream::kTrain, 0)), o.out);
  json steps = json::array();
  for (const auto& s : r.steps) steps.push_back({{"dropped", s.dropped}, {"accuracy", s.accuracy}, {"accepted", s.accepted}});
  std::cout << json{{"subset", r.subset}, {"fullAccuracy", r.fullAccuracy}, {"subsetAccuracy", r.subsetAccuracy},
                    {"steps", std::move(steps)}}
                   .dump()
            << "\n";
  return 0;
}

int cmd_untangle(const Options& o) {
  require(o.session, "--session");
  require(o.model, "--model");
  require(o.out, "--out");
  const SessionLog log = read_session(o.session);
  const auto r = untangle_detailed(log, read_model(o.model), cut_for(o));
  write_clustering(r.clustering, o.out);
  std::cout << r.clustering.clusters().size() << " clusters (cut at " << r.threshold << ")\n";
  return 0;
}

int cmd_evaluate(const Options& o) {
  require(o.computed, "--computed");
  require(o.truth, "--truth");
  const Clustering computed = read_clustering(o.computed);
  const Clustering expected = read_clustering(o.truth);
  const std::string report = match_report_line(match_clusterings(computed, expected));
  if (!o.out.empty()) write_file_atomically(o.out, report);
  std::cout << report;
  return 0;
}

std::vector<LabeledSession> read_manifest(const fs::path& path) {
  std::vector<LabeledSession> sessions;
  const fs::path base = path.parent_path();
  for (const auto& [line, content] : record_lines(read_file(path))) {
    const json r = detail::parse_record(content, line);
    LabeledSession s;
    s.log = read_session(base / detail::string_field(r, "session", line));
    s.truth = read_clustering(base / detail::string_field(r, "truth", line), &s.log);
    sessions.push_back(std::move(s));
  }
  if (sessions.empty()) throw Error(path.string() + ": manifest lists no sessions");
  return sessions;
}

int cmd_experiment(const Options& o) {
  require(o.manifest, "--manifest");
  require(o.out, "--out");
  const auto rows = run_dev_experiment(read_manifest(o.manifest), parse_experiment_mode(o.mode), trainer_for(o),
                                       o.folds, o.seed);
  std::vector<json> lines;
  for (const auto& r : rows) {
    lines.push_back({{"configuration", r.configuration}, {"classifier", o.classifier}, {"train", r.trainDevelopers},
                     {"test", r.testDevelopers}, {"trainSamples", r.trainSamples}, {"testSamples", r.testSamples},
                     {"metrics", metrics_to_json(r.metrics)}});
  }
  write_file_atomically(o.out, dump_lines(lines));
  for (const auto& r : rows) std::cout << r.configuration << " acc " << r.metrics.acc << "\n";
  return 0;
}

ReviewServer* g_server = nullptr;

int cmd_serve(const Options& o) {
  require(o.session, "--session");
  require(o.model, "--model");
  require(o.out, "--out");
  SessionLog log = read_session(o.session);
  Model model = read_model(o.model);
  Clustering proposal = o.clustering.empty() ? untangle::untangle(log, model, cut_for(o)) : read_clustering(o.clustering, &log);
  ReviewServer server(std::move(log), std::move(model), std::move(proposal), o.out, cut_for(o));
  const int port = server.bind(o.host, o.port);
  if (port <= 0) throw Error("cannot bind " + o.host);
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server != nullptr) g_server->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_server != nullptr) g_server->stop();
  });
  std::cout << "serving on http://" << o.host << ":" << port << std::endl;
  server.listen();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Untangle fine-grained IDE change sessions into tasks"};
  app.require_subcommand(1);
  Options o;

  auto seed = [&](CLI::App* c) { c->add_option("--seed", o.seed, "random seed")->capture_default_str(); };
  auto family = [&](CLI::App* c) {
    c->add_option("--classifier", o.classifier, "logreg, nb or forest")
        ->check(CLI::IsMember({"logreg", "nb", "forest"}))
        ->capture_default_str();
    c->add_option("--trees", o.trees, "forest size")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--vars-per-split", o.varsPerSplit, "features tried per split")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    c->add_option("--threads", o.threads, "forest training threads")->capture_default_str()->check(CLI::PositiveNumber);
  };
  auto cut = [&](CLI::App* c) {
    c->add_option("--low-sim-bound", o.lowSimBound, "levels below this are cut candidates")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    c->add_option("--pair-window-secs", o.pairWindowSecs, "pairs at least this far apart score 0")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
  };
  auto out = [&](CLI::App* c, const char* what) { c->add_option("--out", o.out, what); };

  auto* simulate = app.add_subcommand("simulate", "generate a labeled synthetic session");
  seed(simulate);
  out(simulate, "session file to write");
  simulate->add_option("--truth", o.truth, "ground-truth clustering to write");
  simulate->add_option("--tasks", o.synth.numTasks)->capture_default_str();
  simulate->add_option("--min-changes", o.synth.changesPerTask.lo)->capture_default_str();
  simulate->add_option("--max-changes", o.synth.changesPerTask.hi)->capture_default_str();
  simulate->add_option("--class-pool", o.synth.classPoolPerTask)->capture_default_str();
  simulate->add_option("--class-overlap", o.synth.classOverlap)->capture_default_str();
  simulate->add_option("--interleave", o.synth.interleaveProb)->capture_default_str();
  simulate->add_option("--intra-gap-min", o.synth.intraTaskGapSeconds.lo)->capture_default_str();
  simulate->add_option("--intra-gap-max", o.synth.intraTaskGapSeconds.hi)->capture_default_str();
  simulate->add_option("--inter-gap-min", o.synth.interTaskGapSeconds.lo)->capture_default_str();
  simulate->add_option("--inter-gap-max", o.synth.interTaskGapSeconds.hi)->capture_default_str();
  simulate->add_option("--test-run-prob", o.synth.testRunProb)->capture_default_str();
  simulate->add_option("--developer", o.synth.developerId)->capture_default_str();
  simulate->add_option("--id-prefix", o.synth.idPrefix);
  simulate->add_option("--start-time", o.synth.startTime)->capture_default_str();

  auto* featurize = app.add_subcommand("featurize", "session + truth -> pair dataset");
  featurize->add_option("--session", o.session);
  featurize->add_option("--truth", o.truth);
  out(featurize, "dataset file to write");
  featurize->add_option("--pair-window-secs", o.pairWindowSecs)->capture_default_str()->check(CLI::PositiveNumber);

  auto* train = app.add_subcommand("train", "dataset -> model");
  train->add_option("--dataset", o.dataset);
  out(train, "model file to write");
  seed(train);
  family(train);
  train->add_flag("--no-rebalance", o.noRebalance, "train on the dataset as given");

  auto* cv = app.add_subcommand("cv", "k-fold cross validation report");
  cv->add_option("--dataset", o.dataset);
  out(cv, "report file to write");
  seed(cv);
  family(cv);
  cv->add_option("--folds", o.folds)->capture_default_str()->check(CLI::Range(2, 1000));

  auto* importance = app.add_subcommand("importance", "permutation importance ranking");
  importance->add_option("--dataset", o.dataset);
  out(importance, "ranking file to write");
  seed(importance);
  family(importance);
  importance->add_option("--runs", o.runs)->capture_default_str()->check(CLI::PositiveNumber);

  auto* trim = app.add_subcommand("trim", "drop unimportant voters and retrain");
  trim->add_option("--dataset", o.dataset);
  trim->add_option("--ranking", o.ranking, "file written by 'importance'");
  out(trim, "model file to write");
  seed(trim);
  family(trim);
  trim->add_option("--folds", o.folds)->capture_default_str()->check(CLI::Range(2, 1000));
  trim->add_option("--max-acc-loss", o.maxAccLoss)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  trim->add_flag("--no-rebalance", o.noRebalance, "retrain on the dataset as given");

  auto* untangle_cmd = app.add_subcommand("untangle", "session + model -> clustering");
  untangle_cmd->add_option("--session", o.session);
  untangle_cmd->add_option("--model", o.model);
  out(untangle_cmd, "clustering file to write");
  cut(untangle_cmd);

  auto* evaluate = app.add_subcommand("evaluate", "compare a computed clustering with the truth");
  evaluate->add_option("--computed", o.computed);
  evaluate->add_option("--truth", o.truth, "expected clustering");
  out(evaluate, "report file to write (also printed)");

  auto* experiment = app.add_subcommand("experiment", "intradev / crossdev / combined evaluation");
  experiment->add_option("--manifest", o.manifest, "lines of {\"session\": path, \"truth\": path}");
  experiment->add_option("--mode", o.mode)->check(CLI::IsMember({"intradev", "crossdev", "combined"}))->capture_default_str();
  out(experiment, "metrics table to write");
  seed(experiment);
  family(experiment);
  experiment->add_option("--folds", o.folds)->capture_default_str()->check(CLI::Range(2, 1000));

  auto* serve = app.add_subcommand("serve", "HTTP endpoints for the review UI");
  serve->add_option("--session", o.session);
  serve->add_option("--model", o.model);
  serve->add_option("--clustering", o.clustering, "proposal to start from (default: untangle the session)");
  out(serve, "where submitted clusterings are saved");
  serve->add_option("--host", o.host)->capture_default_str();
  serve->add_option("--port", o.port)->capture_default_str()->check(CLI::Range(0, 65535));
  cut(serve);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return cmd_simulate(o);
    if (*featurize) return cmd_featurize(o);
    if (*train) return cmd_train(o);
    if (*cv) return cmd_cv(o);
    if (*importance) return cmd_importance(o);
    if (*trim) return cmd_trim(o);
    if (*untangle_cmd) return cmd_untangle(o);
    if (*evaluate) return cmd_evaluate(o);
    if (*experiment) return cmd_experiment(o);
    if (*serve) return cmd_serve(o);
  } catch (const std::exception& e) {
    std::cerr << "untangle: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
