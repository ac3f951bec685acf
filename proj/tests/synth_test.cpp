#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace untangle;

TEST(Synth, SingleTaskGivesOneCluster) {
  SynthConfig cfg;
  cfg.numTasks = 1;
  const auto s = generate_synthetic_session(cfg);
  ASSERT_EQ(s.truth.clusters().size(), 1u);
  EXPECT_EQ(s.truth.size(), s.log.change_count());
}

TEST(Synth, SameSeedSameSession) {
  SynthConfig cfg;
  cfg.seed = 77;
  cfg.numTasks = 4;
  const auto a = generate_synthetic_session(cfg);
  const auto b = generate_synthetic_session(cfg);
  EXPECT_EQ(session_to_string(a.log), session_to_string(b.log));
  EXPECT_EQ(clustering_to_string(a.truth), clustering_to_string(b.truth));
  cfg.seed = 78;
  EXPECT_NE(session_to_string(generate_synthetic_session(cfg).log), session_to_string(a.log));
}

TEST(Synth, FixedTaskSizes) {
  SynthConfig cfg;
  cfg.numTasks = 3;
  cfg.changesPerTask = {10, 10};
  const auto s = generate_synthetic_session(cfg);
  EXPECT_EQ(s.log.change_count(), 30u);
  const auto clusters = s.truth.clusters();
  ASSERT_EQ(clusters.size(), 3u);
  for (const auto& c : clusters) EXPECT_EQ(c.members.size(), 10u);
}

TEST(Synth, GeneratedSessionsAlwaysValidate) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.numTasks = 1 + seed % 5;
    cfg.classOverlap = static_cast<double>(seed % 3) / 2.0;
    cfg.interleaveProb = static_cast<double>(seed % 4) / 3.0;
    cfg.testRunProb = 0.5;
    const auto s = generate_synthetic_session(cfg);
    EXPECT_NO_THROW(validate_session(s.log));
    EXPECT_NO_THROW(validate_clustering(s.truth, s.log));
    // all method sources are within the parsed grammar
    PairFeaturizer(s.log).warm();
    // files round-trip
    EXPECT_EQ(session_from_string(session_to_string(s.log)), s.log);
  }
}

TEST(Synth, NoInterleavingKeepsTasksContiguous) {
  SynthConfig cfg;
  cfg.numTasks = 4;
  cfg.interleaveProb = 0.0;
  cfg.seed = 5;
  const auto s = generate_synthetic_session(cfg);
  std::set<std::string> finished;
  std::string current;
  for (const auto* c : s.log.changes()) {
    const auto& task = s.truth.cluster_of(c->id);
    if (task != current) {
      EXPECT_FALSE(finished.contains(task)) << task << " resumed";
      if (!current.empty()) finished.insert(current);
      current = task;
    }
  }
}

TEST(Synth, GapsFollowTaskSwitches) {
  SynthConfig cfg;
  cfg.numTasks = 3;
  cfg.interleaveProb = 0.4;
  cfg.intraTaskGapSeconds = {10, 20};
  cfg.interTaskGapSeconds = {5000, 6000};
  const auto s = generate_synthetic_session(cfg);
  const auto changes = s.log.changes();
  for (std::size_t i = 1; i < changes.size(); ++i) {
    const double gap = changes[i]->timestamp - changes[i - 1]->timestamp;
    const bool switched = s.truth.cluster_of(changes[i]->id) != s.truth.cluster_of(changes[i - 1]->id);
    if (switched) {
      EXPECT_GE(gap, 5000.0);
    } else {
      EXPECT_LE(gap, 20.0);
    }
  }
}

TEST(Synth, ZeroOverlapKeepsClassesPrivate) {
  SynthConfig cfg;
  cfg.numTasks = 4;
  cfg.classOverlap = 0.0;
  const auto s = generate_synthetic_session(cfg);
  std::map<std::string, std::set<std::string>> tasks_of_class;
  for (const auto* c : s.log.changes()) tasks_of_class[c->className].insert(s.truth.cluster_of(c->id));
  for (const auto& [cls, tasks] : tasks_of_class) EXPECT_EQ(tasks.size(), 1u) << cls;
}

TEST(Synth, InvalidConfigsAreRejected) {
  SynthConfig cfg;
  cfg.numTasks = 0;
  EXPECT_THROW(generate_synthetic_session(cfg), ValidationError);
  cfg = {};
  cfg.changesPerTask = {5, 3};
  EXPECT_THROW(generate_synthetic_session(cfg), ValidationError);
  cfg = {};
  cfg.classOverlap = 1.5;
  EXPECT_THROW(generate_synthetic_session(cfg), ValidationError);
  cfg = {};
  cfg.intraTaskGapSeconds = {0, 1};
  EXPECT_THROW(generate_synthetic_session(cfg), ValidationError);
}
