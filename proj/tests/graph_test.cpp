#include <gtest/gtest.h>

#include "tiestrength/graph.hpp"

using namespace tiestrength;

namespace {

std::vector<EventRecord> example_log() {
  return {{"dinner", 1, {"a", "b"}},
          {"party", 2, {"b", "c", "d", "e"}},
          {"lunch", 3, {"c", "d"}}};
}

}  // namespace

TEST(Graph, InternsPeopleInFirstAppearanceOrder) {
  const auto g = build_graph(example_log());
  ASSERT_EQ(g.num_people(), 5u);
  ASSERT_EQ(g.num_events(), 3u);
  EXPECT_EQ(g.person_label(PersonId{0}), "a");
  EXPECT_EQ(g.person_label(PersonId{4}), "e");
  EXPECT_EQ(g.degree(g.person("b")), 2u);
  EXPECT_EQ(g.event_size(*g.find_event("party")), 4u);
  EXPECT_FALSE(g.find_person("zed").has_value());
  EXPECT_THROW(g.person("zed"), InputError);
}

TEST(Graph, CollapsesDuplicateAttendees) {
  const std::vector<EventRecord> log = {{"x", 0, {"a", "b", "a", "a"}}};
  const auto g = build_graph(log);
  EXPECT_EQ(g.event_size(EventId{0}), 2u);
  EXPECT_EQ(g.duplicate_participants(), 2u);
}

TEST(Graph, RejectsDuplicateEventIdsAndEmptyLabels) {
  const std::vector<EventRecord> dup = {{"x", 0, {"a", "b"}}, {"x", 1, {"c"}}};
  EXPECT_THROW(build_graph(dup), InputError);
  const std::vector<EventRecord> blank = {{"x", 0, {"a", ""}}};
  EXPECT_THROW(build_graph(blank), InputError);
}

TEST(Graph, ExtraPeopleAreIsolated) {
  const auto log = example_log();
  const auto g = build_graph(log, {"lonely"});
  const auto p = g.person("lonely");
  EXPECT_EQ(g.degree(p), 0u);
  EXPECT_TRUE(common_events(g, p, g.person("a")).empty());
}

TEST(Graph, TieProfiles) {
  const std::vector<EventRecord> log = {
      {"e1", 0, {"u", "v", "w"}}, {"e2", 1, {"u", "v"}}, {"e3", 2, {"u", "v", "w", "x", "y"}}};
  const auto g = build_graph(log);
  const auto p = tie_profile(g, g.person("u"), g.person("v"));
  EXPECT_EQ(p.sizes(), (std::vector<std::size_t>{2, 3, 5}));
  EXPECT_EQ(p.to_string(), "(2,3,5)");
  EXPECT_TRUE(tie_profile(g, g.person("x"), g.person("y")) == TieProfile(std::vector<std::size_t>{5}));
  EXPECT_THROW(tie_profile(g, g.person("u"), g.person("u")), InputError);
}

TEST(Graph, TieProfileValidation) {
  EXPECT_THROW(TieProfile(std::vector<std::size_t>{3, 2}), InputError);
  EXPECT_THROW(TieProfile(std::vector<std::size_t>{1}), InputError);
  EXPECT_NO_THROW(TieProfile(std::vector<std::size_t>{}));
  EXPECT_EQ(TieProfile::from_unsorted({4, 2, 3}).sizes(), (std::vector<std::size_t>{2, 3, 4}));
}

TEST(Graph, AllTiesAreExactlyTheCoAttendingPairs) {
  const auto g = build_graph(example_log());
  const auto ties = all_ties(g);
  // a-b, b-c, b-d, b-e, c-d, c-e, d-e
  ASSERT_EQ(ties.size(), 7u);
  for (std::size_t i = 1; i < ties.size(); ++i) EXPECT_LT(ties[i - 1], ties[i]);
  for (const Tie& t : ties) EXPECT_FALSE(common_events(g, t.first, t.second).empty());
}

TEST(Graph, EventSizeHistogram) {
  const std::vector<EventRecord> log = {{"a", 0, {"p", "q"}}, {"b", 1, {"r", "s"}}, {"c", 2, {"p", "q", "r", "s", "t"}}};
  const auto h = event_size_histogram(build_graph(log));
  EXPECT_EQ(h, (std::map<std::size_t, std::size_t>{{2, 2}, {5, 1}}));
}

TEST(Graph, EventsByTimeBreaksTiesByLabel) {
  const std::vector<EventRecord> log = {{"z", 5, {"a", "b"}}, {"m", 1, {"a"}}, {"b", 5, {"b"}}};
  const auto g = build_graph(log);
  const auto order = g.events_by_time();
  ASSERT_EQ(order.size(), 3u);
  EXPECT_EQ(g.event_label(order[0]), "m");
  EXPECT_EQ(g.event_label(order[1]), "b");
  EXPECT_EQ(g.event_label(order[2]), "z");
  EXPECT_TRUE(g.has_all_timestamps());
}

TEST(Graph, RoundTripsToRecords) {
  const auto log = example_log();
  const auto g = build_graph(log);
  EXPECT_EQ(g.to_records(), log);
}
