#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "test_support.hpp"
#include "tiestrength/stats.hpp"

using namespace tiestrength;

TEST(Stats, KnownTauValues) {
  EXPECT_DOUBLE_EQ(kendall_tau_b({1, 2, 3, 4}, {1, 2, 3, 4}), 1.0);
  EXPECT_DOUBLE_EQ(kendall_tau_b({1, 2, 3, 4}, {4, 3, 2, 1}), -1.0);
  // Concordant 5, discordant 1 and no ties: (5 - 1) / 6.
  EXPECT_DOUBLE_EQ(kendall_tau_b({1, 2, 3, 4}, {1, 3, 2, 4}), 4.0 / 6.0);
  EXPECT_EQ(kendall_tau_b({1, 1, 1}, {1, 2, 3}), 0.0);
  EXPECT_THROW(kendall_tau_b({1}, {1}), InputError);
  EXPECT_THROW(kendall_tau_b({1, 2}, {1}), InputError);
}

TEST(Stats, MatchesQuadraticOracleWithTies) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> x(200), y(200);
    for (auto& v : x) v = static_cast<double>(rng() % 15);
    for (auto& v : y) v = static_cast<double>(rng() % 9);
    EXPECT_NEAR(kendall_tau_b(x, y), oracle::kendall_quadratic(x, y), 1e-12);
  }
}

TEST(Stats, MissingKeysReadAsZero) {
  const std::vector<EventRecord> log = {{"P", 0, {"a", "b", "c"}}};
  const auto g = build_graph(log);
  TieScoreTable a(MeasureSpec(MeasureKind::Common)), b(MeasureSpec(MeasureKind::Common));
  a.set(Tie(PersonId{0}, PersonId{1}), 3);
  a.set(Tie(PersonId{0}, PersonId{2}), 2);
  b.set(Tie(PersonId{0}, PersonId{1}), 5);
  b.set(Tie(PersonId{1}, PersonId{2}), 1);
  EXPECT_NEAR(kendall_tau(a, b), oracle::kendall_quadratic({3, 2, 0}, {5, 0, 1}), 1e-15);
}

TEST(Stats, MatrixOfDuplicateMeasureIsAllOnes) {
  const std::vector<EventRecord> log = {{"P", 0, {"a", "b", "c"}}, {"Q", 1, {"a", "b"}}, {"R", 2, {"c", "d"}}};
  const auto g = build_graph(log);
  const auto m = tau_matrix(g, {MeasureSpec(MeasureKind::Delta), MeasureSpec(MeasureKind::Delta)}, {PairScope::Ties, 1});
  for (const auto& row : m.values) {
    for (double v : row) EXPECT_EQ(v, 1.0);
  }
  std::ostringstream out;
  write_tau_matrix(out, m);
  EXPECT_EQ(out.str(),
            "# kendall tau-b; keys=ties; missing scores read as 0\n"
            "measure,delta,delta\ndelta,1.000000,1.000000\ndelta,1.000000,1.000000\n");
  EXPECT_THROW(tau_matrix(g, {MeasureSpec(MeasureKind::Delta)}), ConfigError);
}

TEST(Stats, FailedMeasuresAreMarkedMissing) {
  const std::vector<EventRecord> log = {{"P", std::nullopt, {"a", "b", "c"}}, {"Q", 1, {"a", "b"}}};
  const auto g = build_graph(log);
  const auto m = tau_matrix(g, {MeasureSpec(MeasureKind::Common), MeasureSpec(MeasureKind::TemporalProportional)},
                            {PairScope::Ties, 1});
  EXPECT_TRUE(m.is_missing(1));
  EXPECT_FALSE(m.is_missing(0));
  ASSERT_EQ(m.missing.size(), 1u);
  std::ostringstream out;
  write_tau_matrix(out, m);
  EXPECT_NE(out.str().find("NA"), std::string::npos);
}
