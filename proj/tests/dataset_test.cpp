#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace untangle;
using namespace untangle::testing;

TEST(BuildPairs, SameClusterOneHourApart) {
  const auto log = session_of({method_change("a", 0, "A", "f", "", "f ^ 1"), method_change("b", 3600, "A", "g", "", "g ^ 1")});
  const Dataset ds = build_pairs(log, clustering_of({{"a", "T"}, {"b", "T"}}));
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_TRUE(ds.samples[0].label);
  EXPECT_EQ(ds.samples[0].idA, "a");
  EXPECT_EQ(ds.samples[0].features.size(), kVoterCount);
  EXPECT_EQ(ds.featureNames, all_voter_names());
}

TEST(BuildPairs, FourDaysApartGivesNoSample) {
  const auto log =
      session_of({method_change("a", 0, "A", "f", "", "f ^ 1"), method_change("b", 4 * 86400, "A", "g", "", "g ^ 1")});
  EXPECT_EQ(build_pairs(log, clustering_of({{"a", "T"}, {"b", "T"}})).size(), 0u);
  // exactly three days apart is outside the strict window
  const auto edge =
      session_of({method_change("a", 0, "A", "f", "", "f ^ 1"), method_change("b", 259200, "A", "g", "", "g ^ 1")});
  EXPECT_EQ(build_pairs(edge, clustering_of({{"a", "T"}, {"b", "T"}})).size(), 0u);
}

TEST(BuildPairs, AllPairsInsideTheWindow) {
  SynthConfig cfg;
  cfg.numTasks = 3;
  cfg.seed = 9;
  const auto s = generate_synthetic_session(cfg);
  const std::size_t n = s.log.change_count();
  const Dataset ds = build_pairs(s.log, s.truth);
  EXPECT_EQ(ds.size(), n * (n - 1) / 2);
  std::size_t same = 0;
  for (const auto& c : s.truth.clusters()) same += c.members.size() * (c.members.size() - 1) / 2;
  EXPECT_EQ(ds.positives(), same);
}

TEST(BuildPairs, CoverageMismatchIsAnError) {
  const auto log = session_of({method_change("a", 0, "A", "f", "", "f ^ 1"), method_change("b", 1, "A", "g", "", "g ^ 1")});
  EXPECT_THROW(build_pairs(log, clustering_of({{"a", "T"}})), ValidationError);
}

namespace {

Dataset labeled(std::size_t trues, std::size_t falses) {
  std::vector<std::vector<double>> rows;
  std::vector<bool> labels;
  for (std::size_t i = 0; i < trues + falses; ++i) {
    rows.push_back({static_cast<double>(i)});
    labels.push_back(i < trues);
  }
  return make_dataset({"x"}, rows, labels);
}

}  // namespace

TEST(Rebalance, DownSamplesFalsesToTwiceTheTrues) {
  const Dataset r = rebalance(labeled(100, 900), 1);
  EXPECT_EQ(r.positives(), 100u);
  EXPECT_EQ(r.size() - r.positives(), 200u);
  for (std::size_t i = 1; i < r.size(); ++i) EXPECT_LT(r.samples[i - 1].features[0], r.samples[i].features[0]);
}

TEST(Rebalance, KeepsEverythingWhenFalsesAreScarce) {
  const Dataset ds = labeled(100, 150);
  EXPECT_EQ(rebalance(ds, 1).samples, ds.samples);
}

TEST(Rebalance, DeterministicPerSeed) {
  const Dataset ds = labeled(50, 500);
  EXPECT_EQ(rebalance(ds, 7).samples, rebalance(ds, 7).samples);
  EXPECT_NE(rebalance(ds, 7).samples, rebalance(ds, 8).samples);
}

TEST(DatasetIo, RoundTrip) {
  SynthConfig cfg;
  cfg.seed = 4;
  const auto s = generate_synthetic_session(cfg);
  const Dataset ds = build_pairs(s.log, s.truth);
  const std::string text = dataset_to_string(ds);
  const Dataset back = dataset_from_string(text);
  EXPECT_EQ(back.featureNames, ds.featureNames);
  EXPECT_EQ(back.samples, ds.samples);
  EXPECT_EQ(back.provenance, ds.provenance);
  EXPECT_EQ(dataset_to_string(back), text);
}

TEST(DatasetIo, RejectsRaggedRows) {
  const std::string text = R"({"featureNames":["x","y"],"provenance":[]})"
                           "\n"
                           R"({"idA":"a","idB":"b","label":true,"features":[1]})"
                           "\n";
  EXPECT_THROW(dataset_from_string(text), Error);
}

TEST(SelectFeatures, KeepsRequestedColumns) {
  const Dataset ds = make_dataset({"x", "y", "z"}, {{1, 2, 3}, {4, 5, 6}}, {true, false});
  const Dataset s = select_features(ds, {"z", "x"});
  EXPECT_EQ(s.featureNames, (std::vector<std::string>{"z", "x"}));
  EXPECT_EQ(s.samples[1].features, (std::vector<double>{6, 4}));
  EXPECT_THROW(select_features(ds, {"w"}), Error);
}
