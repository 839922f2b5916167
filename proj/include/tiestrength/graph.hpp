#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tiestrength/error.hpp"

namespace tiestrength {

/// Dense index into a graph's person table.
struct PersonId {
  std::uint32_t value = 0;
  friend auto operator<=>(const PersonId&, const PersonId&) = default;
};

/// Dense index into a graph's event table.
struct EventId {
  std::uint32_t value = 0;
  friend auto operator<=>(const EventId&, const EventId&) = default;
};

/// One event as it arrives from a log: identifier, optional time, attendees.
struct EventRecord {
  std::string event_id;
  std::optional<std::int64_t> time;
  std::vector<std::string> participants;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

/// Unordered person pair stored with `first < second`.
struct Tie {
  PersonId first;
  PersonId second;

  Tie() = default;
  Tie(PersonId a, PersonId b) : first(std::min(a, b)), second(std::max(a, b)) {}

  friend auto operator<=>(const Tie&, const Tie&) = default;
};

/// Ascending sequence of the sizes of the events two people share.
class TieProfile {
 public:
  TieProfile() = default;

  /// Rejects unsorted sequences and entries below 2.
  explicit TieProfile(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
    for (std::size_t i = 0; i < sizes_.size(); ++i) {
      if (sizes_[i] < 2) {
        throw InputError("tie profile entries must be at least 2, got " +
                         std::to_string(sizes_[i]));
      }
      if (i > 0 && sizes_[i - 1] > sizes_[i]) {
        throw InputError("tie profile must be sorted ascending");
      }
    }
  }

  static TieProfile from_unsorted(std::vector<std::size_t> sizes) {
    std::sort(sizes.begin(), sizes.end());
    return TieProfile(std::move(sizes));
  }

  const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }
  std::size_t size() const noexcept { return sizes_.size(); }
  bool empty() const noexcept { return sizes_.empty(); }
  std::size_t operator[](std::size_t i) const { return sizes_[i]; }
  auto begin() const noexcept { return sizes_.begin(); }
  auto end() const noexcept { return sizes_.end(); }

  friend bool operator==(const TieProfile&, const TieProfile&) = default;

  std::string to_string() const {
    std::string out = "(";
    for (std::size_t i = 0; i < sizes_.size(); ++i) {
      if (i > 0) out += ',';
      out += std::to_string(sizes_[i]);
    }
    return out + ")";
  }

 private:
  std::vector<std::size_t> sizes_;
};

/// Canonical enumeration order on profiles: shorter first, then lexicographic.
struct ProfileLengthLexLess {
  bool operator()(const TieProfile& a, const TieProfile& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }
};

class BipartiteGraph;
BipartiteGraph build_graph(std::span<const EventRecord> events,
                           std::span<const std::string> extra_people);

/// Immutable person x event incidence structure.
///
/// Person indices follow first appearance in the event list, then any extra
/// people passed to build_graph. Each event's participant list is sorted by
/// PersonId; each person's event list is sorted by EventId.
class BipartiteGraph {
 public:
  BipartiteGraph() = default;

  std::size_t num_people() const noexcept { return person_labels_.size(); }
  std::size_t num_events() const noexcept { return event_labels_.size(); }

  const std::string& person_label(PersonId p) const { return person_labels_.at(p.value); }
  const std::string& event_label(EventId e) const { return event_labels_.at(e.value); }
  std::optional<std::int64_t> event_time(EventId e) const { return event_times_.at(e.value); }

  std::optional<PersonId> find_person(std::string_view label) const {
    auto it = person_index_.find(label);
    if (it == person_index_.end()) return std::nullopt;
    return PersonId{it->second};
  }

  /// Like find_person but rejects unknown labels.
  PersonId person(std::string_view label) const {
    if (auto p = find_person(label)) return *p;
    throw InputError("unknown person '" + std::string(label) + "'");
  }

  std::optional<EventId> find_event(std::string_view label) const {
    auto it = event_index_.find(label);
    if (it == event_index_.end()) return std::nullopt;
    return EventId{it->second};
  }

  std::span<const PersonId> participants(EventId e) const {
    return event_people_.at(e.value);
  }
  std::span<const EventId> events_of(PersonId p) const { return person_events_.at(p.value); }

  std::size_t event_size(EventId e) const { return event_people_.at(e.value).size(); }
  std::size_t degree(PersonId p) const { return person_events_.at(p.value).size(); }

  bool contains(PersonId p) const noexcept { return p.value < person_labels_.size(); }

  void check_person(PersonId p) const {
    if (!contains(p)) {
      throw InputError("unknown person index " + std::to_string(p.value));
    }
  }

  /// Number of repeated participant entries collapsed during construction.
  std::size_t duplicate_participants() const noexcept { return duplicates_; }

  bool has_all_timestamps() const noexcept {
    return std::all_of(event_times_.begin(), event_times_.end(),
                       [](const auto& t) { return t.has_value(); });
  }

  /// Events in processing order for time-ordered measures: (time, label).
  std::vector<EventId> events_by_time() const {
    std::vector<EventId> order(num_events());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = EventId{i};
    std::stable_sort(order.begin(), order.end(), [&](EventId a, EventId b) {
      const auto ta = event_times_[a.value].value_or(0);
      const auto tb = event_times_[b.value].value_or(0);
      if (ta != tb) return ta < tb;
      return event_labels_[a.value] < event_labels_[b.value];
    });
    return order;
  }

  /// Reconstructs the event log this graph was built from (deduplicated).
  std::vector<EventRecord> to_records() const {
    std::vector<EventRecord> out;
    out.reserve(num_events());
    for (std::uint32_t e = 0; e < num_events(); ++e) {
      EventRecord rec{event_labels_[e], event_times_[e], {}};
      for (PersonId p : event_people_[e]) rec.participants.push_back(person_labels_[p.value]);
      out.push_back(std::move(rec));
    }
    return out;
  }

 private:
  friend BipartiteGraph build_graph(std::span<const EventRecord>, std::span<const std::string>);

  std::vector<std::string> person_labels_;
  std::map<std::string, std::uint32_t, std::less<>> person_index_;
  std::vector<std::string> event_labels_;
  std::map<std::string, std::uint32_t, std::less<>> event_index_;
  std::vector<std::optional<std::int64_t>> event_times_;
  std::vector<std::vector<PersonId>> event_people_;
  std::vector<std::vector<EventId>> person_events_;
  std::size_t duplicates_ = 0;
};

/// Builds the incidence structure. Duplicate attendees inside one event are
/// collapsed and counted; duplicate event identifiers are rejected.
inline BipartiteGraph build_graph(std::span<const EventRecord> events,
                                  std::span<const std::string> extra_people = {}) {
  BipartiteGraph g;
  auto intern = [&g](const std::string& label) {
    auto [it, inserted] =
        g.person_index_.try_emplace(label, static_cast<std::uint32_t>(g.person_labels_.size()));
    if (inserted) {
      g.person_labels_.push_back(label);
      g.person_events_.emplace_back();
    }
    return PersonId{it->second};
  };

  for (const EventRecord& rec : events) {
    const auto eid = static_cast<std::uint32_t>(g.event_labels_.size());
    if (!g.event_index_.try_emplace(rec.event_id, eid).second) {
      throw InputError("duplicate event identifier '" + rec.event_id + "'");
    }
    g.event_labels_.push_back(rec.event_id);
    g.event_times_.push_back(rec.time);

    std::vector<PersonId> people;
    people.reserve(rec.participants.size());
    for (const std::string& label : rec.participants) {
      if (label.empty()) throw InputError("empty participant label in event '" + rec.event_id + "'");
      people.push_back(intern(label));
    }
    std::sort(people.begin(), people.end());
    const auto last = std::unique(people.begin(), people.end());
    g.duplicates_ += static_cast<std::size_t>(people.end() - last);
    people.erase(last, people.end());
    for (PersonId p : people) g.person_events_[p.value].push_back(EventId{eid});
    g.event_people_.push_back(std::move(people));
  }
  for (const std::string& label : extra_people) {
    if (label.empty()) throw InputError("empty person label");
    intern(label);
  }
  return g;
}

inline BipartiteGraph build_graph(std::span<const EventRecord> events,
                                  std::initializer_list<std::string> extra_people) {
  const std::vector<std::string> extra(extra_people);
  return build_graph(events, std::span<const std::string>(extra));
}

namespace detail {

inline void check_pair(const BipartiteGraph& g, PersonId u, PersonId v) {
  g.check_person(u);
  g.check_person(v);
  if (u == v) throw InputError("a tie needs two distinct people");
}

}  // namespace detail

/// Events whose participant set contains both u and v, ascending by id.
inline std::vector<EventId> common_events(const BipartiteGraph& g, PersonId u, PersonId v) {
  detail::check_pair(g, u, v);
  const auto a = g.events_of(u);
  const auto b = g.events_of(v);
  std::vector<EventId> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline TieProfile tie_profile(const BipartiteGraph& g, PersonId u, PersonId v) {
  std::vector<std::size_t> sizes;
  for (EventId e : common_events(g, u, v)) sizes.push_back(g.event_size(e));
  return TieProfile::from_unsorted(std::move(sizes));
}

/// Every unordered pair with at least one common event, sorted by index.
inline std::vector<Tie> all_ties(const BipartiteGraph& g) {
  std::vector<Tie> out;
  std::vector<std::uint32_t> seen(g.num_people(), UINT32_MAX);
  std::vector<PersonId> partners;
  for (std::uint32_t u = 0; u < g.num_people(); ++u) {
    partners.clear();
    for (EventId e : g.events_of(PersonId{u})) {
      for (PersonId w : g.participants(e)) {
        if (w.value > u && seen[w.value] != u) {
          seen[w.value] = u;
          partners.push_back(w);
        }
      }
    }
    std::sort(partners.begin(), partners.end());
    for (PersonId w : partners) out.emplace_back(PersonId{u}, w);
  }
  return out;
}

/// Number of events per attendee count.
inline std::map<std::size_t, std::size_t> event_size_histogram(const BipartiteGraph& g) {
  std::map<std::size_t, std::size_t> hist;
  for (std::uint32_t e = 0; e < g.num_events(); ++e) ++hist[g.event_size(EventId{e})];
  return hist;
}

}  // namespace tiestrength
