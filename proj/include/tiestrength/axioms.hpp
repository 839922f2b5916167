#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "tiestrength/error.hpp"
#include "tiestrength/graph.hpp"
#include "tiestrength/measures.hpp"

namespace tiestrength {

enum class AxiomId {
  A1_Isomorphism,
  A2_Baseline,
  A3_Frequency,
  A4_Intimacy,
  A5_LargerEventsMoreTies,
  A6_CondIndepVertices,
  A7_CondIndepEvents,
  A8_Submodularity,
};

inline constexpr std::array<AxiomId, 8> kAllAxioms = {
    AxiomId::A1_Isomorphism,          AxiomId::A2_Baseline,
    AxiomId::A3_Frequency,            AxiomId::A4_Intimacy,
    AxiomId::A5_LargerEventsMoreTies, AxiomId::A6_CondIndepVertices,
    AxiomId::A7_CondIndepEvents,      AxiomId::A8_Submodularity,
};

inline std::size_t axiom_index(AxiomId a) { return static_cast<std::size_t>(a); }

inline std::string axiom_code(AxiomId a) { return "A" + std::to_string(axiom_index(a) + 1); }

inline std::string_view axiom_title(AxiomId a) {
  switch (a) {
    case AxiomId::A1_Isomorphism: return "isomorphism";
    case AxiomId::A2_Baseline: return "baseline";
    case AxiomId::A3_Frequency: return "frequency";
    case AxiomId::A4_Intimacy: return "intimacy";
    case AxiomId::A5_LargerEventsMoreTies: return "larger events create more ties";
    case AxiomId::A6_CondIndepVertices: return "conditional independence of vertices";
    case AxiomId::A7_CondIndepEvents: return "conditional independence of events";
    case AxiomId::A8_Submodularity: return "submodularity";
  }
  return "unknown";
}

inline AxiomId parse_axiom(std::string_view code) {
  for (AxiomId a : kAllAxioms) {
    if (axiom_code(a) == code) return a;
  }
  throw ConfigError("unknown axiom '" + std::string(code) + "'");
}

/// Strict: TS is exactly 0 with no events and exactly 1 on a lone two-person
/// event. Positive: the second value only has to be > 0.
enum class BaselineMode { Strict, Positive };

inline std::string_view baseline_mode_name(BaselineMode m) {
  return m == BaselineMode::Strict ? "strict" : "positive";
}

inline BaselineMode parse_baseline_mode(std::string_view s) {
  if (s == "strict") return BaselineMode::Strict;
  if (s == "positive") return BaselineMode::Positive;
  throw ConfigError("unknown A2 mode '" + std::string(s) + "' (expected strict or positive)");
}

/// Classification of the eleven non-temporal measures reported in the
/// literature: true = satisfies, false = fails. Empty for Temporal.
inline std::optional<bool> reference_classification(MeasureKind kind, AxiomId axiom) {
  using K = MeasureKind;
  static const std::map<K, std::array<bool, 8>> rows = {
      {K::Common, {1, 1, 1, 1, 1, 1, 1, 1}},
      {K::Jaccard, {1, 1, 1, 1, 1, 0, 0, 0}},
      {K::Delta, {1, 1, 1, 1, 1, 1, 1, 1}},
      {K::AdamicAdar, {1, 1, 1, 1, 1, 1, 1, 1}},
      {K::Katz, {1, 0, 1, 1, 1, 1, 0, 0}},
      {K::Preferential, {1, 1, 0, 1, 1, 1, 0, 0}},
      {K::RandomWalkRestart, {1, 0, 0, 0, 1, 1, 0, 0}},
      {K::SimRank, {1, 0, 0, 0, 0, 0, 0, 0}},
      {K::Max, {1, 1, 1, 1, 1, 1, 1, 1}},
      {K::Linear, {1, 1, 1, 1, 1, 1, 1, 1}},
      {K::Proportional, {1, 0, 0, 1, 0, 1, 0, 0}},
  };
  auto it = rows.find(kind);
  if (it == rows.end()) return std::nullopt;
  return it->second[axiom_index(axiom)];
}

// ---------------------------------------------------------------------------
// Random instances.

struct GraphBounds {
  std::size_t max_people = 8;
  std::size_t max_events = 6;
  std::size_t max_event_size = 5;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::size_t draw(std::mt19937_64& rng, std::size_t n) {
  return n == 0 ? 0 : static_cast<std::size_t>(rng() % n);
}

inline bool coin(std::mt19937_64& rng, unsigned one_in = 2) { return rng() % one_in == 0; }

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[draw(rng, i)]);
}

}  // namespace detail

/// Deterministic source of small random event logs. Trial i of axiom a draws
/// from a generator seeded by (seed, a, i), so trials are independent of
/// each other and of evaluation order.
class GraphSampler {
 public:
  explicit GraphSampler(std::uint64_t seed, GraphBounds bounds = {}) : seed_(seed), bounds_(bounds) {
    if (bounds_.max_people < 3 || bounds_.max_events < 1 || bounds_.max_event_size < 2) {
      throw ConfigError("sampler bounds need max_people >= 3, max_events >= 1, max_event_size >= 2");
    }
  }

  std::uint64_t seed() const noexcept { return seed_; }
  const GraphBounds& bounds() const noexcept { return bounds_; }

  /// Perturb this log on every trial instead of drawing fresh ones.
  void set_base(std::vector<EventRecord> base) { base_ = std::move(base); }
  const std::optional<std::vector<EventRecord>>& base() const noexcept { return base_; }

  std::mt19937_64 trial_rng(std::uint64_t stream, std::uint64_t trial) const {
    return std::mt19937_64(
        detail::splitmix64(seed_ ^ detail::splitmix64((stream << 40) ^ trial)));
  }

  /// A log with 3..max_people people "p<i>" and 1..max_events events "e<j>"
  /// stamped with time j.
  std::vector<EventRecord> sample(std::mt19937_64& rng) const {
    if (base_) return *base_;
    const std::size_t n = 3 + detail::draw(rng, bounds_.max_people - 2);
    const std::size_t m = 1 + detail::draw(rng, bounds_.max_events);
    std::vector<std::string> people;
    for (std::size_t i = 0; i < n; ++i) people.push_back("p" + std::to_string(i));
    std::vector<EventRecord> events;
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t size = 1 + detail::draw(rng, std::min(bounds_.max_event_size, n));
      auto pool = people;
      detail::shuffle(pool, rng);
      pool.resize(size);
      events.push_back({"e" + std::to_string(j), static_cast<std::int64_t>(j), std::move(pool)});
    }
    return events;
  }

 private:
  std::uint64_t seed_;
  GraphBounds bounds_;
  std::optional<std::vector<EventRecord>> base_;
};

// ---------------------------------------------------------------------------
// Concrete test cases.

/// Rename people and events and reorder the event list.
struct Relabel {
  std::map<std::string, std::string> people;
  std::map<std::string, std::string> events;
  /// Original event ids in their new list order.
  std::vector<std::string> event_order;
};
struct AddEvent {
  EventRecord event;
};
struct RemoveEvent {
  std::string event_id;
};
struct RemoveAttendee {
  std::string event_id;
  std::string person;
};
/// Two single-event graphs of the given sizes, larger >= smaller.
struct CompareSingleEvents {
  std::size_t larger = 0;
  std::size_t smaller = 0;
};
/// The empty graph and the lone two-person event.
struct BaselineGraphs {};

using Perturbation =
    std::variant<Relabel, AddEvent, RemoveEvent, RemoveAttendee, CompareSingleEvents, BaselineGraphs>;

/// One replayable instance: a base log, a focal pair and a perturbation.
struct AxiomCase {
  AxiomId axiom = AxiomId::A1_Isomorphism;
  std::vector<EventRecord> base;
  std::string u;
  std::string v;
  Perturbation change;
};

struct Counterexample {
  AxiomId axiom = AxiomId::A1_Isomorphism;
  MeasureSpec spec{MeasureKind::Common};
  BaselineMode mode = BaselineMode::Positive;
  /// One case, or two for the A7 functional-dependence check.
  std::vector<AxiomCase> cases;
  /// Values each case produced; replays must reproduce them exactly.
  std::vector<std::vector<double>> observed;
  std::string detail;
};

enum class VerdictKind { Pass, Violated, Inapplicable };

inline std::string_view verdict_name(VerdictKind k) {
  switch (k) {
    case VerdictKind::Pass: return "pass";
    case VerdictKind::Violated: return "violated";
    case VerdictKind::Inapplicable: return "inapplicable";
  }
  return "unknown";
}

struct AxiomVerdict {
  VerdictKind kind = VerdictKind::Pass;
  /// Trials evaluated without a measure failure.
  std::size_t trials_run = 0;
  /// Trials dropped because the measure failed (e.g. non-convergence) or the
  /// instance did not fit the axiom.
  std::size_t trials_skipped = 0;
  std::optional<Counterexample> counterexample;
  std::string reason;
};

struct AxiomReport {
  MeasureSpec spec{MeasureKind::Common};
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  BaselineMode mode = BaselineMode::Positive;
  std::array<AxiomVerdict, 8> verdicts;
  AxiomVerdict a2_strict;
  AxiomVerdict a2_positive;

  const AxiomVerdict& operator[](AxiomId a) const { return verdicts[axiom_index(a)]; }
};

namespace detail {

/// Equality / inequality slack: 1e-12 for closed forms, the measure's own
/// tolerance for iterative ones, scaled by the magnitude of the values.
inline double slack(const MeasureSpec& spec, double a, double b) {
  const double base = spec.is_iterative() ? spec.params().tolerance : 1e-12;
  return base * std::max({1.0, std::abs(a), std::abs(b)});
}

inline std::vector<std::string> people_of(const std::vector<EventRecord>& events) {
  std::set<std::string> s;
  for (const auto& e : events) s.insert(e.participants.begin(), e.participants.end());
  return {s.begin(), s.end()};
}

/// Graph over `events` that also knows every label in `universe`.
inline BipartiteGraph make_graph(const std::vector<EventRecord>& events,
                                 const std::vector<std::string>& universe) {
  return build_graph(events, std::span<const std::string>(universe));
}

/// TS(u -> x) for every person x of g, computing shared state once.
inline std::vector<double> strengths_from(const BipartiteGraph& g, PersonId u, const MeasureSpec& spec) {
  std::vector<double> out(g.num_people(), 0.0);
  switch (spec.kind()) {
    case MeasureKind::Katz: out = katz_from(g, u, spec); break;
    case MeasureKind::RandomWalkRestart: out = rwr_from(g, u, spec).people; break;
    case MeasureKind::SimRank: {
      const auto sim = simrank_matrix(g, spec);
      for (std::uint32_t x = 0; x < g.num_people(); ++x) out[x] = sim.at(u, PersonId{x});
      break;
    }
    case MeasureKind::Proportional:
      for (const auto& [x, s] : proportional_row(g, u, spec).scores) out[x.value] = s;
      break;
    case MeasureKind::TemporalProportional: {
      const auto ts = temporal_directed(g, spec);
      for (std::uint32_t x = 0; x < g.num_people(); ++x) {
        auto it = ts.find(pair_key(u, PersonId{x}));
        if (it != ts.end()) out[x] = it->second;
      }
      break;
    }
    default:
      for (std::uint32_t x = 0; x < g.num_people(); ++x) {
        if (x != u.value) out[x] = tie_strength(g, u, PersonId{x}, spec);
      }
      break;
  }
  out[u.value] = 0.0;
  return out;
}

inline double ts(const BipartiteGraph& g, const std::string& u, const std::string& v,
                 const MeasureSpec& spec) {
  return tie_strength(g, g.person(u), g.person(v), spec);
}

/// Sum of TS over the unordered pairs of one k-person event (directed
/// measures contribute the mean of both directions).
inline double single_event_total(std::size_t k, const MeasureSpec& spec) {
  std::vector<std::string> people;
  for (std::size_t i = 0; i < k; ++i) people.push_back("q" + std::to_string(i));
  const std::vector<EventRecord> ev = {{"P", 0, people}};
  const auto g = make_graph(ev, people);
  double total = 0.0;
  for (const auto& [tie, s] : score_all(g, spec, {PairScope::Ties, 1})) total += s;
  return total;
}

inline std::vector<EventRecord> apply(const AxiomCase& c) {
  return std::visit(
      [&](const auto& p) -> std::vector<EventRecord> {
        using P = std::decay_t<decltype(p)>;
        std::vector<EventRecord> out = c.base;
        if constexpr (std::is_same_v<P, Relabel>) {
          std::map<std::string, const EventRecord*> by_id;
          for (const auto& e : c.base) by_id[e.event_id] = &e;
          out.clear();
          auto rename = [](const std::map<std::string, std::string>& m, const std::string& s) {
            auto it = m.find(s);
            return it == m.end() ? s : it->second;
          };
          for (const auto& id : p.event_order) {
            auto it = by_id.find(id);
            if (it == by_id.end()) continue;
            EventRecord r{rename(p.events, id), it->second->time, {}};
            for (const auto& x : it->second->participants) r.participants.push_back(rename(p.people, x));
            out.push_back(std::move(r));
          }
        } else if constexpr (std::is_same_v<P, AddEvent>) {
          out.push_back(p.event);
        } else if constexpr (std::is_same_v<P, RemoveEvent>) {
          std::erase_if(out, [&](const EventRecord& e) { return e.event_id == p.event_id; });
        } else if constexpr (std::is_same_v<P, RemoveAttendee>) {
          for (auto& e : out) {
            if (e.event_id == p.event_id) std::erase(e.participants, p.person);
          }
        }
        return out;
      },
      c.change);
}

inline std::vector<std::string> universe_of(const AxiomCase& c, const std::vector<EventRecord>& after) {
  std::set<std::string> s;
  for (const auto& e : c.base) s.insert(e.participants.begin(), e.participants.end());
  for (const auto& e : after) s.insert(e.participants.begin(), e.participants.end());
  s.insert(c.u);
  s.insert(c.v);
  return {s.begin(), s.end()};
}

struct CaseOutcome {
  bool violated = false;
  std::vector<double> observed;
  std::string detail;
};

inline std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Evaluates one case. Measure failures propagate as exceptions.
inline CaseOutcome evaluate_case(const AxiomCase& c, const MeasureSpec& spec, BaselineMode mode) {
  CaseOutcome out;
  auto lower = [&](double should_be_high, double should_be_low) {
    return should_be_high < should_be_low - slack(spec, should_be_high, should_be_low);
  };
  auto differ = [&](double a, double b) { return std::abs(a - b) > slack(spec, a, b); };

  switch (c.axiom) {
    case AxiomId::A2_Baseline: {
      const std::vector<EventRecord> none;
      const std::vector<EventRecord> pair = {{"P", 0, {"u", "v"}}};
      const std::vector<std::string> uv = {"u", "v"};
      const double empty = ts(make_graph(none, uv), "u", "v", spec);
      const double duo = ts(make_graph(pair, uv), "u", "v", spec);
      out.observed = {empty, duo};
      const bool empty_ok = !differ(empty, 0.0);
      const bool duo_ok = mode == BaselineMode::Strict ? !differ(duo, 1.0) : duo > 0.0;
      out.violated = !(empty_ok && duo_ok);
      out.detail = "TS(empty graph) = " + fmt(empty) + ", TS(lone two-person event) = " + fmt(duo) +
                   (mode == BaselineMode::Strict ? " (need 0 and 1)" : " (need 0 and > 0)");
      return out;
    }
    case AxiomId::A5_LargerEventsMoreTies: {
      const auto& p = std::get<CompareSingleEvents>(c.change);
      const double big = single_event_total(p.larger, spec);
      const double small = single_event_total(p.smaller, spec);
      out.observed = {big, small};
      out.violated = lower(big, small);
      out.detail = "total TS of a " + std::to_string(p.larger) + "-person event " + fmt(big) +
                   " < total of a " + std::to_string(p.smaller) + "-person event " + fmt(small);
      return out;
    }
    default: break;
  }

  const auto after = apply(c);
  const auto universe = universe_of(c, after);
  const auto g = make_graph(c.base, universe);

  switch (c.axiom) {
    case AxiomId::A1_Isomorphism: {
      const auto& p = std::get<Relabel>(c.change);
      std::vector<std::string> renamed;
      for (const auto& x : universe) {
        auto it = p.people.find(x);
        renamed.push_back(it == p.people.end() ? x : it->second);
      }
      std::sort(renamed.begin(), renamed.end());
      const auto h = make_graph(after, renamed);
      const std::string a = p.people.count(c.u) ? p.people.at(c.u) : c.u;
      const std::string b = p.people.count(c.v) ? p.people.at(c.v) : c.v;
      const double tg = ts(g, c.u, c.v, spec);
      const double th = ts(h, a, b, spec);
      out.observed = {tg, th};
      out.violated = differ(tg, th);
      out.detail = "TS_G(" + c.u + "," + c.v + ") = " + fmt(tg) + " but TS_H(" + a + "," + b +
                   ") = " + fmt(th) + " on the relabelled graph";
      return out;
    }
    case AxiomId::A3_Frequency:
    case AxiomId::A4_Intimacy: {
      const auto h = make_graph(after, universe);
      const double before = ts(g, c.u, c.v, spec);
      const double later = ts(h, c.u, c.v, spec);
      out.observed = {before, later};
      out.violated = lower(later, before);
      out.detail = std::string(c.axiom == AxiomId::A3_Frequency ? "adding a common event"
                                                                 : "removing an attendee from a common event") +
                   " lowered TS(" + c.u + "," + c.v + ") from " + fmt(before) + " to " + fmt(later);
      return out;
    }
    case AxiomId::A6_CondIndepVertices: {
      const auto h = make_graph(after, universe);
      const auto su = strengths_from(g, g.person(c.u), spec);
      const auto sh = strengths_from(h, h.person(c.u), spec);
      for (const auto& x : universe) {
        if (x == c.u) continue;
        const double a = su[g.person(x).value];
        const double b = sh[h.person(x).value];
        out.observed.push_back(a);
        out.observed.push_back(b);
        if (!out.violated && differ(a, b)) {
          out.violated = true;
          out.detail = "an event without " + c.u + " changed TS(" + c.u + "," + x + ") from " + fmt(a) +
                       " to " + fmt(b);
        }
      }
      return out;
    }
    case AxiomId::A7_CondIndepEvents: {
      const auto h = make_graph(after, universe);
      const auto& p = std::get<AddEvent>(c.change);
      std::set<std::string> members(p.event.participants.begin(), p.event.participants.end());
      out.observed = {ts(g, c.u, c.v, spec), static_cast<double>(members.size()),
                      ts(h, c.u, c.v, spec)};
      return out;
    }
    case AxiomId::A8_Submodularity: {
      const auto& p = std::get<AddEvent>(c.change);
      const auto h = make_graph(after, universe);
      const std::vector<EventRecord> only = {p.event};
      const auto q = make_graph(only, universe);
      const double tg = ts(g, c.u, c.v, spec);
      const double tq = ts(q, c.u, c.v, spec);
      const double tgq = ts(h, c.u, c.v, spec);
      out.observed = {tg, tq, tgq};
      out.violated = lower(tg + tq, tgq);
      out.detail = "TS_G + TS_Q = " + fmt(tg) + " + " + fmt(tq) + " < TS_{G+Q} = " + fmt(tgq);
      return out;
    }
    default: break;
  }
  throw ConfigError("unhandled axiom");
}

inline std::int64_t a7_key(double ts_before) { return std::llround(ts_before * 1e9); }

/// A7 falsification between two observations (TS_G, |P|, TS_{G+P}).
inline std::optional<std::string> a7_conflict(const std::vector<double>& a, const std::vector<double>& b,
                                              const MeasureSpec& spec) {
  if (a[1] != b[1]) return std::nullopt;
  const auto ka = a7_key(a[0]), kb = a7_key(b[0]);
  if (ka == kb) {
    if (std::abs(a[2] - b[2]) > slack(spec, a[2], b[2])) {
      return "equal existing TS " + fmt(a[0]) + " and event size " + fmt(a[1]) +
             " led to different results " + fmt(a[2]) + " and " + fmt(b[2]);
    }
    return std::nullopt;
  }
  const auto& lo = ka < kb ? a : b;
  const auto& hi = ka < kb ? b : a;
  if (lo[2] > hi[2] + slack(spec, lo[2], hi[2])) {
    return "larger existing TS " + fmt(hi[0]) + " > " + fmt(lo[0]) + " gave a smaller result " +
           fmt(hi[2]) + " < " + fmt(lo[2]) + " for event size " + fmt(a[1]);
  }
  return std::nullopt;
}

/// Re-evaluates a counterexample's cases; returns the observed values and the
/// violation message, if the violation still occurs.
inline std::optional<std::pair<std::vector<std::vector<double>>, std::string>> evaluate_counterexample(
    const Counterexample& cx) {
  std::vector<std::vector<double>> observed;
  try {
    for (const auto& c : cx.cases) observed.push_back(evaluate_case(c, cx.spec, cx.mode).observed);
  } catch (const Error&) {
    return std::nullopt;
  }
  if (cx.axiom == AxiomId::A7_CondIndepEvents) {
    if (observed.size() != 2) return std::nullopt;
    if (auto d = a7_conflict(observed[0], observed[1], cx.spec)) return std::make_pair(observed, *d);
    return std::nullopt;
  }
  const auto o = evaluate_case(cx.cases.at(0), cx.spec, cx.mode);
  if (!o.violated) return std::nullopt;
  return std::make_pair(observed, o.detail);
}

// Case generation ----------------------------------------------------------

inline std::vector<std::string> extend_people(const std::vector<EventRecord>& events) {
  auto people = people_of(events);
  if (people.size() < 2) {
    for (std::size_t i = 0; people.size() < 2; ++i) {
      const std::string label = "p" + std::to_string(i);
      if (std::find(people.begin(), people.end(), label) == people.end()) people.push_back(label);
    }
  }
  return people;
}

inline std::string fresh_event_id(const std::vector<EventRecord>& events) {
  std::set<std::string> ids;
  for (const auto& e : events) ids.insert(e.event_id);
  for (std::size_t i = 0;; ++i) {
    std::string id = "x" + std::to_string(i);
    if (!ids.count(id)) return id;
  }
}

inline std::int64_t next_time(const std::vector<EventRecord>& events) {
  std::int64_t t = 0;
  for (const auto& e : events) t = std::max(t, e.time.value_or(0) + 1);
  return t;
}

/// Event containing `must` plus a random subset of `pool` and, sometimes, a
/// person who is new to the graph.
inline EventRecord random_event(const std::vector<EventRecord>& base, const std::vector<std::string>& must,
                                const std::vector<std::string>& pool, std::mt19937_64& rng) {
  EventRecord e{fresh_event_id(base), next_time(base), must};
  for (const auto& x : pool) {
    if (std::find(must.begin(), must.end(), x) == must.end() && coin(rng)) e.participants.push_back(x);
  }
  if (coin(rng, 4)) e.participants.push_back("n0");
  return e;
}

/// Draws a case for `axiom`; empty when the base log cannot host one.
inline std::optional<AxiomCase> generate_case(AxiomId axiom, const GraphSampler& sampler,
                                              std::mt19937_64& rng) {
  AxiomCase c;
  c.axiom = axiom;
  if (axiom == AxiomId::A2_Baseline) {
    c.u = "u";
    c.v = "v";
    c.change = BaselineGraphs{};
    return c;
  }
  if (axiom == AxiomId::A5_LargerEventsMoreTies) {
    const std::size_t s = sampler.bounds().max_event_size;
    std::size_t a = 1 + draw(rng, s), b = 1 + draw(rng, s);
    if (a < b) std::swap(a, b);
    c.u = "q0";
    c.v = "q1";
    c.change = CompareSingleEvents{a, b};
    return c;
  }

  c.base = sampler.sample(rng);
  const auto people = extend_people(c.base);
  auto pick_pair = [&](std::string& u, std::string& v) {
    const std::size_t i = draw(rng, people.size());
    std::size_t j = draw(rng, people.size() - 1);
    if (j >= i) ++j;
    u = people[i];
    v = people[j];
  };

  switch (axiom) {
    case AxiomId::A1_Isomorphism: {
      pick_pair(c.u, c.v);
      Relabel r;
      auto shuffled = people;
      shuffle(shuffled, rng);
      for (std::size_t i = 0; i < people.size(); ++i) r.people[people[i]] = shuffled[i];
      std::vector<std::string> ids;
      for (const auto& e : c.base) ids.push_back(e.event_id);
      auto renamed = ids;
      shuffle(renamed, rng);
      for (std::size_t i = 0; i < ids.size(); ++i) r.events[ids[i]] = renamed[i];
      r.event_order = ids;
      shuffle(r.event_order, rng);
      c.change = std::move(r);
      return c;
    }
    case AxiomId::A3_Frequency:
    case AxiomId::A7_CondIndepEvents:
    case AxiomId::A8_Submodularity: {
      pick_pair(c.u, c.v);
      c.change = AddEvent{random_event(c.base, {c.u, c.v}, people, rng)};
      return c;
    }
    case AxiomId::A4_Intimacy: {
      std::vector<std::size_t> big;
      for (std::size_t i = 0; i < c.base.size(); ++i) {
        if (std::set<std::string>(c.base[i].participants.begin(), c.base[i].participants.end()).size() >= 3) {
          big.push_back(i);
        }
      }
      if (big.empty()) return std::nullopt;
      const auto& ev = c.base[big[draw(rng, big.size())]];
      const std::set<std::string> unique(ev.participants.begin(), ev.participants.end());
      std::vector<std::string> members(unique.begin(), unique.end());
      shuffle(members, rng);
      c.u = members[0];
      c.v = members[1];
      c.change = RemoveAttendee{ev.event_id, members[2]};
      return c;
    }
    case AxiomId::A6_CondIndepVertices: {
      pick_pair(c.u, c.v);
      std::vector<std::string> without_u;
      for (const auto& e : c.base) {
        if (std::find(e.participants.begin(), e.participants.end(), c.u) == e.participants.end()) {
          without_u.push_back(e.event_id);
        }
      }
      if (!without_u.empty() && coin(rng)) {
        c.change = RemoveEvent{without_u[draw(rng, without_u.size())]};
      } else {
        std::vector<std::string> others;
        for (const auto& x : people) {
          if (x != c.u) others.push_back(x);
        }
        EventRecord e{fresh_event_id(c.base), next_time(c.base), {}};
        for (const auto& x : others) {
          if (coin(rng)) e.participants.push_back(x);
        }
        if (e.participants.empty() || coin(rng, 4)) e.participants.push_back(others[draw(rng, others.size())]);
        std::sort(e.participants.begin(), e.participants.end());
        e.participants.erase(std::unique(e.participants.begin(), e.participants.end()), e.participants.end());
        c.change = AddEvent{std::move(e)};
      }
      return c;
    }
    default: break;
  }
  return std::nullopt;
}

// Shrinking ----------------------------------------------------------------

inline std::set<std::string> protected_people(const AxiomCase& c) {
  std::set<std::string> keep = {c.u, c.v};
  if (const auto* r = std::get_if<RemoveAttendee>(&c.change)) keep.insert(r->person);
  return keep;
}

inline std::set<std::string> protected_events(const AxiomCase& c) {
  std::set<std::string> keep;
  if (const auto* r = std::get_if<RemoveAttendee>(&c.change)) keep.insert(r->event_id);
  if (const auto* r = std::get_if<RemoveEvent>(&c.change)) keep.insert(r->event_id);
  return keep;
}

inline void remove_person(AxiomCase& c, const std::string& x) {
  for (auto& e : c.base) std::erase(e.participants, x);
  if (auto* a = std::get_if<AddEvent>(&c.change)) std::erase(a->event.participants, x);
}

/// Removes events, then people, from each case while the violation persists.
inline Counterexample shrink(Counterexample cx) {
  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t ci = 0; ci < cx.cases.size(); ++ci) {
      // Events.
      for (std::size_t i = 0; i < cx.cases[ci].base.size();) {
        if (protected_events(cx.cases[ci]).count(cx.cases[ci].base[i].event_id)) {
          ++i;
          continue;
        }
        Counterexample trial = cx;
        trial.cases[ci].base.erase(trial.cases[ci].base.begin() + static_cast<std::ptrdiff_t>(i));
        if (auto r = evaluate_counterexample(trial)) {
          trial.observed = r->first;
          trial.detail = r->second;
          cx = std::move(trial);
          progress = true;
        } else {
          ++i;
        }
      }
      // People.
      std::vector<EventRecord> all = cx.cases[ci].base;
      if (auto* a = std::get_if<AddEvent>(&cx.cases[ci].change)) all.push_back(a->event);
      const auto keep = protected_people(cx.cases[ci]);
      for (const auto& x : people_of(all)) {
        if (keep.count(x)) continue;
        Counterexample trial = cx;
        remove_person(trial.cases[ci], x);
        if (auto r = evaluate_counterexample(trial)) {
          trial.observed = r->first;
          trial.detail = r->second;
          cx = std::move(trial);
          progress = true;
        }
      }
      // Event sizes for the single-event comparison.
      if (auto* p = std::get_if<CompareSingleEvents>(&cx.cases[ci].change)) {
        for (int which = 0; which < 2; ++which) {
          while (true) {
            Counterexample trial = cx;
            auto& q = std::get<CompareSingleEvents>(trial.cases[ci].change);
            std::size_t& target = which == 0 ? q.larger : q.smaller;
            if (target <= 1 || (which == 0 && q.larger <= q.smaller)) break;
            --target;
            auto r = evaluate_counterexample(trial);
            if (!r) break;
            trial.observed = r->first;
            trial.detail = r->second;
            cx = std::move(trial);
            progress = true;
          }
        }
        (void)p;
      }
    }
  }
  return cx;
}

}  // namespace detail

namespace detail {

/// Shared trial loop for check_axiom and find_counterexample.
inline AxiomVerdict run_trials(AxiomId axiom, const MeasureSpec& spec, const GraphSampler& sampler,
                               std::size_t trials, BaselineMode mode) {
  AxiomVerdict verdict;
  if (axiom == AxiomId::A2_Baseline) trials = 1;
  // A7 observations grouped by event size, then by rounded TS_G.
  std::map<double, std::map<std::int64_t, std::pair<AxiomCase, std::vector<double>>>> seen;

  for (std::size_t t = 0; t < trials; ++t) {
    auto rng = sampler.trial_rng(axiom_index(axiom), t);
    auto c = generate_case(axiom, sampler, rng);
    if (!c) {
      ++verdict.trials_skipped;
      continue;
    }
    CaseOutcome o;
    try {
      o = evaluate_case(*c, spec, mode);
    } catch (const Error&) {
      ++verdict.trials_skipped;
      continue;
    }
    ++verdict.trials_run;

    if (axiom == AxiomId::A7_CondIndepEvents) {
      auto& group = seen[o.observed[1]];
      const auto key = a7_key(o.observed[0]);
      std::vector<const std::pair<AxiomCase, std::vector<double>>*> neighbours;
      auto it = group.lower_bound(key);
      if (it != group.end()) neighbours.push_back(&it->second);
      if (it != group.end() && it->first == key) {
        // Exact key hit: only the stored observation is relevant.
      } else {
        if (it != group.begin()) neighbours.push_back(&std::prev(it)->second);
      }
      for (const auto* n : neighbours) {
        if (auto d = a7_conflict(n->second, o.observed, spec)) {
          verdict.kind = VerdictKind::Violated;
          verdict.counterexample = Counterexample{axiom, spec, mode, {n->first, *c}, {n->second, o.observed}, *d};
          return verdict;
        }
      }
      group.try_emplace(key, *c, o.observed);
      continue;
    }
    if (o.violated) {
      verdict.kind = VerdictKind::Violated;
      verdict.counterexample = Counterexample{axiom, spec, mode, {*c}, {o.observed}, o.detail};
      return verdict;
    }
  }
  if (verdict.trials_run == 0) {
    verdict.kind = VerdictKind::Inapplicable;
    verdict.reason = "no trial could be evaluated";
  }
  return verdict;
}

}  // namespace detail

/// Runs `trials` randomized perturbation tests of one axiom and returns the
/// first violation found, or Pass. A2 is deterministic and runs once.
inline AxiomVerdict check_axiom(AxiomId axiom, const MeasureSpec& spec, const GraphSampler& sampler,
                                std::size_t trials, BaselineMode mode = BaselineMode::Positive) {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  return detail::run_trials(axiom, spec, sampler, trials, mode);
}

inline AxiomReport check_all_axioms(const MeasureSpec& spec, const GraphSampler& sampler, std::size_t trials,
                                    BaselineMode mode = BaselineMode::Positive) {
  AxiomReport report;
  report.spec = spec;
  report.seed = sampler.seed();
  report.trials = trials;
  report.mode = mode;
  for (AxiomId a : kAllAxioms) report.verdicts[axiom_index(a)] = check_axiom(a, spec, sampler, trials, mode);
  report.a2_strict = check_axiom(AxiomId::A2_Baseline, spec, sampler, 1, BaselineMode::Strict);
  report.a2_positive = check_axiom(AxiomId::A2_Baseline, spec, sampler, 1, BaselineMode::Positive);
  return report;
}

/// Removes events, then people, while the violation persists.
inline Counterexample shrink_counterexample(Counterexample cx) { return detail::shrink(std::move(cx)); }

/// Searches up to `budget` instances and shrinks the first violation found.
inline std::optional<Counterexample> find_counterexample(AxiomId axiom, const MeasureSpec& spec,
                                                         const GraphSampler& sampler, std::size_t budget,
                                                         BaselineMode mode = BaselineMode::Positive) {
  if (budget < 1) throw ConfigError("budget must be >= 1");
  auto verdict = detail::run_trials(axiom, spec, sampler, budget, mode);
  if (verdict.kind != VerdictKind::Violated) return std::nullopt;
  return shrink_counterexample(std::move(*verdict.counterexample));
}

/// True iff re-running the counterexample reproduces the violation with
/// bit-identical observed values.
inline bool replay(const Counterexample& cx) {
  auto r = detail::evaluate_counterexample(cx);
  return r && r->first == cx.observed;
}

// ---------------------------------------------------------------------------
// Lemma-level properties.

/// Checks on sampled graphs that every score is non-negative and that pairs
/// without a common event score 0.
inline AxiomVerdict check_zero_without_common_events(const MeasureSpec& spec, const GraphSampler& sampler,
                                                     std::size_t trials) {
  AxiomVerdict verdict;
  for (std::size_t t = 0; t < trials; ++t) {
    auto rng = sampler.trial_rng(100, t);
    const auto events = sampler.sample(rng);
    const auto people = detail::people_of(events);
    const auto g = detail::make_graph(events, people);
    try {
      for (std::uint32_t u = 0; u < g.num_people(); ++u) {
        const auto row = detail::strengths_from(g, PersonId{u}, spec);
        for (std::uint32_t x = 0; x < g.num_people(); ++x) {
          if (x == u) continue;
          const bool shares = !common_events(g, PersonId{u}, PersonId{x}).empty();
          if (row[x] < 0.0 || (!shares && row[x] != 0.0)) {
            verdict.kind = VerdictKind::Violated;
            verdict.reason = "TS(" + g.person_label(PersonId{u}) + "," + g.person_label(PersonId{x}) +
                             ") = " + detail::fmt(row[x]) + (shares ? "" : " without a common event");
            return verdict;
          }
        }
      }
      ++verdict.trials_run;
    } catch (const Error&) {
      ++verdict.trials_skipped;
    }
  }
  return verdict;
}

struct SingleEventTotals {
  /// f(k) = C(k,2) h(k) for k = 2..max_size (index 0 is k = 2).
  std::vector<double> totals;
  bool monotone = true;
  /// 1 <= f(k) <= C(k,2) for every k.
  bool bounded = true;
};

inline SingleEventTotals single_event_totals(const CharacterizedMeasure& m, std::size_t max_size) {
  SingleEventTotals out;
  for (std::size_t k = 2; k <= max_size; ++k) {
    const double f = m.single_event_total(k);
    const double pairs = static_cast<double>(k * (k - 1) / 2);
    if (!out.totals.empty() && f < out.totals.back()) out.monotone = false;
    if (f < 1.0 - 1e-12 || f > pairs + 1e-12) out.bounded = false;
    out.totals.push_back(f);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization.

inline nlohmann::json to_json(const EventRecord& e) {
  nlohmann::json j = {{"event_id", e.event_id}, {"participants", e.participants}};
  if (e.time) j["time"] = *e.time;
  return j;
}

inline EventRecord event_from_json(const nlohmann::json& j) {
  EventRecord e;
  e.event_id = j.at("event_id").get<std::string>();
  e.participants = j.at("participants").get<std::vector<std::string>>();
  if (j.contains("time") && !j["time"].is_null()) e.time = j["time"].get<std::int64_t>();
  return e;
}

inline nlohmann::json to_json(const MeasureSpec& s) {
  const auto& p = s.params();
  return {{"kind", std::string(s.name())},
          {"katz_gamma", p.katz_gamma},
          {"katz_max_walk_length", p.katz_max_walk_length},
          {"rwr_alpha", p.rwr_alpha},
          {"simrank_gamma", p.simrank_gamma},
          {"epsilon", p.epsilon},
          {"temporal_init", p.temporal_init},
          {"tolerance", p.tolerance},
          {"max_iterations", p.max_iterations}};
}

inline MeasureSpec spec_from_json(const nlohmann::json& j) {
  MeasureParams p;
  p.katz_gamma = j.at("katz_gamma").get<double>();
  p.katz_max_walk_length = j.at("katz_max_walk_length").get<unsigned>();
  p.rwr_alpha = j.at("rwr_alpha").get<double>();
  p.simrank_gamma = j.at("simrank_gamma").get<double>();
  p.epsilon = j.at("epsilon").get<double>();
  p.temporal_init = j.at("temporal_init").get<double>();
  p.tolerance = j.at("tolerance").get<double>();
  p.max_iterations = j.at("max_iterations").get<std::size_t>();
  return MeasureSpec(parse_measure(j.at("kind").get<std::string>()), p);
}

inline nlohmann::json to_json(const AxiomCase& c) {
  nlohmann::json base = nlohmann::json::array();
  for (const auto& e : c.base) base.push_back(to_json(e));
  nlohmann::json change = std::visit(
      [](const auto& p) -> nlohmann::json {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, Relabel>) {
          return {{"type", "relabel"}, {"people", p.people}, {"events", p.events}, {"event_order", p.event_order}};
        } else if constexpr (std::is_same_v<P, AddEvent>) {
          return {{"type", "add_event"}, {"event", to_json(p.event)}};
        } else if constexpr (std::is_same_v<P, RemoveEvent>) {
          return {{"type", "remove_event"}, {"event_id", p.event_id}};
        } else if constexpr (std::is_same_v<P, RemoveAttendee>) {
          return {{"type", "remove_attendee"}, {"event_id", p.event_id}, {"person", p.person}};
        } else if constexpr (std::is_same_v<P, CompareSingleEvents>) {
          return {{"type", "compare_single_events"}, {"larger", p.larger}, {"smaller", p.smaller}};
        } else {
          return {{"type", "baseline"}};
        }
      },
      c.change);
  return {{"axiom", axiom_code(c.axiom)}, {"base", base}, {"u", c.u}, {"v", c.v}, {"change", change}};
}

inline AxiomCase case_from_json(const nlohmann::json& j) {
  AxiomCase c;
  c.axiom = parse_axiom(j.at("axiom").get<std::string>());
  for (const auto& e : j.at("base")) c.base.push_back(event_from_json(e));
  c.u = j.at("u").get<std::string>();
  c.v = j.at("v").get<std::string>();
  const auto& ch = j.at("change");
  const auto type = ch.at("type").get<std::string>();
  if (type == "relabel") {
    c.change = Relabel{ch.at("people").get<std::map<std::string, std::string>>(),
                       ch.at("events").get<std::map<std::string, std::string>>(),
                       ch.at("event_order").get<std::vector<std::string>>()};
  } else if (type == "add_event") {
    c.change = AddEvent{event_from_json(ch.at("event"))};
  } else if (type == "remove_event") {
    c.change = RemoveEvent{ch.at("event_id").get<std::string>()};
  } else if (type == "remove_attendee") {
    c.change = RemoveAttendee{ch.at("event_id").get<std::string>(), ch.at("person").get<std::string>()};
  } else if (type == "compare_single_events") {
    c.change = CompareSingleEvents{ch.at("larger").get<std::size_t>(), ch.at("smaller").get<std::size_t>()};
  } else if (type == "baseline") {
    c.change = BaselineGraphs{};
  } else {
    throw InputError("unknown perturbation type '" + type + "'");
  }
  return c;
}

inline nlohmann::json to_json(const Counterexample& cx) {
  nlohmann::json cases = nlohmann::json::array();
  for (const auto& c : cx.cases) cases.push_back(to_json(c));
  return {{"axiom", axiom_code(cx.axiom)},
          {"measure", to_json(cx.spec)},
          {"a2_mode", std::string(baseline_mode_name(cx.mode))},
          {"cases", cases},
          {"observed", cx.observed},
          {"detail", cx.detail}};
}

inline Counterexample counterexample_from_json(const nlohmann::json& j) {
  Counterexample cx;
  cx.axiom = parse_axiom(j.at("axiom").get<std::string>());
  cx.spec = spec_from_json(j.at("measure"));
  cx.mode = parse_baseline_mode(j.at("a2_mode").get<std::string>());
  for (const auto& c : j.at("cases")) cx.cases.push_back(case_from_json(c));
  cx.observed = j.at("observed").get<std::vector<std::vector<double>>>();
  cx.detail = j.at("detail").get<std::string>();
  return cx;
}

inline nlohmann::json to_json(const AxiomVerdict& v) {
  nlohmann::json j = {{"verdict", std::string(verdict_name(v.kind))},
                      {"trials_run", v.trials_run},
                      {"trials_skipped", v.trials_skipped}};
  if (!v.reason.empty()) j["reason"] = v.reason;
  if (v.counterexample) j["counterexample"] = to_json(*v.counterexample);
  return j;
}

/// One record per axiom; A2 appears in both modes, with cells that disagree
/// with the reference classification listed under "discrepancies".
inline nlohmann::json to_json(const AxiomReport& r) {
  nlohmann::json axioms = nlohmann::json::array();
  nlohmann::json discrepancies = nlohmann::json::array();
  for (AxiomId a : kAllAxioms) {
    auto rec = to_json(r[a]);
    rec["axiom"] = axiom_code(a);
    rec["title"] = std::string(axiom_title(a));
    if (auto ref = reference_classification(r.spec.kind(), a)) {
      rec["reference"] = *ref ? "satisfies" : "fails";
      const auto& v = r[a];
      // A2 is listed once per mode below.
      if (a != AxiomId::A2_Baseline && v.kind != VerdictKind::Inapplicable && (v.kind == VerdictKind::Pass) != *ref) {
        discrepancies.push_back(axiom_code(a) + ": observed " + std::string(verdict_name(v.kind)) +
                                ", reference " + (*ref ? "satisfies" : "fails"));
      }
    }
    axioms.push_back(std::move(rec));
  }
  if (auto ref = reference_classification(r.spec.kind(), AxiomId::A2_Baseline)) {
    for (const auto* v : {&r.a2_strict, &r.a2_positive}) {
      if ((v->kind == VerdictKind::Pass) != *ref) {
        discrepancies.push_back(std::string("A2 (") + (v == &r.a2_strict ? "strict" : "positive") +
                                "): observed " + std::string(verdict_name(v->kind)) + ", reference " +
                                (*ref ? "satisfies" : "fails"));
      }
    }
  }
  return {{"measure", to_json(r.spec)},
          {"seed", r.seed},
          {"trials", r.trials},
          {"a2_mode", std::string(baseline_mode_name(r.mode))},
          {"axioms", axioms},
          {"a2_strict", to_json(r.a2_strict)},
          {"a2_positive", to_json(r.a2_positive)},
          {"discrepancies", discrepancies}};
}

}  // namespace tiestrength
