#include <gtest/gtest.h>

#include <numeric>

#include "test_support.hpp"

using namespace untangle;
using namespace untangle::testing;

namespace {

Clustering figure_computed() {
  return clustering_of({{"ch1", "C1"}, {"ch2", "C1"}, {"ch5", "C2"}, {"ch6", "C2"}, {"ch3", "C3"}, {"ch4", "C4"}});
}

Clustering figure_expected() {
  return clustering_of({{"ch3", "E1"}, {"ch1", "E2"}, {"ch2", "E2"}, {"ch4", "E3"}, {"ch5", "E4"}, {"ch6", "E5"}});
}

}  // namespace

TEST(Jaccard, Basics) {
  EXPECT_EQ(jaccard({"a", "b"}, {"a", "b"}), 1.0);
  EXPECT_EQ(jaccard({"a"}, {"b"}), 0.0);
  EXPECT_EQ(jaccard({"ch5", "ch6"}, {"ch5"}), 0.5);
  EXPECT_EQ(jaccard({}, {}), 0.0);
  EXPECT_EQ(jaccard({"a"}, {}), 0.0);
}

TEST(MatchClusterings, FigureInstance) {
  const MatchResult r = match_clusterings(figure_computed(), figure_expected());
  EXPECT_EQ(r.totalJaccard, 3.5);
  EXPECT_NEAR(r.successRate, 5.0 / 6.0, 1e-12);
  const std::vector<std::pair<std::string, std::string>> want{
      {"C1", "E2"}, {"C2", "E4"}, {"C3", "E1"}, {"C4", "E3"}, {"virtual-1", "E5"}};
  EXPECT_EQ(r.pairs, want);
  EXPECT_FALSE(r.perChange.at("ch6"));
  EXPECT_TRUE(r.perChange.at("ch5"));
}

TEST(MatchClusterings, FigureInstanceFiles) {
  const auto computed = read_clustering(std::string(UNTANGLE_DATA_DIR) + "/figure_instance/computed.jsonl");
  const auto expected = read_clustering(std::string(UNTANGLE_DATA_DIR) + "/figure_instance/expected.jsonl");
  EXPECT_EQ(computed, figure_computed());
  EXPECT_EQ(expected, figure_expected());
}

TEST(MatchClusterings, IdenticalClusterings) {
  const auto c = clustering_of({{"a", "X"}, {"b", "X"}, {"c", "Y"}, {"d", "Z"}});
  const MatchResult r = match_clusterings(c, c);
  EXPECT_EQ(r.totalJaccard, 3.0);
  EXPECT_EQ(r.successRate, 1.0);
  EXPECT_EQ(success_rate(c, c), 1.0);
}

TEST(MatchClusterings, OneBigClusterAgainstSingletons) {
  const std::size_t n = 5;
  Clustering big, singles;
  for (std::size_t i = 0; i < n; ++i) {
    big.assign("c" + std::to_string(i), "ALL");
    singles.assign("c" + std::to_string(i), "S" + std::to_string(i));
  }
  const MatchResult r = match_clusterings(big, singles);
  EXPECT_DOUBLE_EQ(r.totalJaccard, 1.0 / n);
  std::size_t ok = 0;
  std::string partner;
  for (const auto& [c, e] : r.pairs)
    if (c == "ALL") partner = e;
  for (const auto& [change, success] : r.perChange) {
    ok += success;
    EXPECT_EQ(success, singles.cluster_of(change) == partner);
  }
  EXPECT_EQ(ok, 1u);
}

TEST(MatchClusterings, CrossedTwoByTwo) {
  const auto a = clustering_of({{"a", "1"}, {"b", "1"}, {"c", "2"}, {"d", "2"}});
  const auto b = clustering_of({{"a", "x"}, {"c", "x"}, {"b", "y"}, {"d", "y"}});
  EXPECT_EQ(success_rate(a, b), 0.5);
}

TEST(MatchClusterings, CoverageMismatchIsAnError) {
  EXPECT_THROW(match_clusterings(clustering_of({{"a", "1"}}), clustering_of({{"b", "1"}})), ValidationError);
  EXPECT_THROW(match_clusterings(clustering_of({{"a", "1"}}), clustering_of({{"a", "1"}, {"b", "1"}})),
               ValidationError);
  EXPECT_THROW(success_rate(Clustering{}, Clustering{}), Error);
}

TEST(MatchReport, ContainsTheSuccessRate) {
  const std::string line = match_report_line(match_clusterings(figure_computed(), figure_expected()));
  const auto j = json::parse(line);
  EXPECT_EQ(j["totalJaccard"].get<double>(), 3.5);
  EXPECT_NEAR(j["successRate"].get<double>(), 0.8333, 1e-4);
  EXPECT_EQ(j["matching"].size(), 5u);
}

TEST(Hungarian, MatchesBruteForceOnSmallMatrices) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(6);
    std::vector<std::vector<double>> w(n, std::vector<double>(n));
    for (auto& row : w)
      for (auto& x : row) x = static_cast<double>(rng.below(7));
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = -1;
    do {
      double s = 0;
      for (std::size_t i = 0; i < n; ++i) s += w[i][perm[i]];
      best = std::max(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    const auto a = hungarian_max_weight(w);
    double got = 0;
    std::vector<bool> used(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_FALSE(used[a[i]]);
      used[a[i]] = true;
      got += w[i][a[i]];
    }
    EXPECT_EQ(got, best);
  }
}

TEST(Hungarian, RejectsNonSquare) {
  EXPECT_THROW(hungarian_min_cost({{1, 2}}), Error);
  EXPECT_TRUE(hungarian_min_cost({}).empty());
}
