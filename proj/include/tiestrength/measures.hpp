#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tiestrength/error.hpp"
#include "tiestrength/graph.hpp"
#include "tiestrength/parallel.hpp"

namespace tiestrength {

enum class MeasureKind {
  Common,
  Jaccard,
  Delta,
  AdamicAdar,
  Linear,
  Preferential,
  Katz,
  RandomWalkRestart,
  SimRank,
  Max,
  Proportional,
  TemporalProportional,
};

inline constexpr std::array<MeasureKind, 12> kAllMeasures = {
    MeasureKind::Common,       MeasureKind::Jaccard,
    MeasureKind::Delta,        MeasureKind::AdamicAdar,
    MeasureKind::Linear,       MeasureKind::Preferential,
    MeasureKind::Katz,         MeasureKind::RandomWalkRestart,
    MeasureKind::SimRank,      MeasureKind::Max,
    MeasureKind::Proportional, MeasureKind::TemporalProportional,
};

inline std::string_view measure_name(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::Common: return "common";
    case MeasureKind::Jaccard: return "jaccard";
    case MeasureKind::Delta: return "delta";
    case MeasureKind::AdamicAdar: return "adamic-adar";
    case MeasureKind::Linear: return "linear";
    case MeasureKind::Preferential: return "preferential";
    case MeasureKind::Katz: return "katz";
    case MeasureKind::RandomWalkRestart: return "rwr";
    case MeasureKind::SimRank: return "simrank";
    case MeasureKind::Max: return "max";
    case MeasureKind::Proportional: return "proportional";
    case MeasureKind::TemporalProportional: return "temporal";
  }
  return "unknown";
}

inline MeasureKind parse_measure(std::string_view name) {
  std::string key;
  for (char c : name) {
    if (c == '_' || c == ' ') c = '-';
    key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  static const std::map<std::string, MeasureKind, std::less<>> aliases = {
      {"common", MeasureKind::Common},
      {"common-neighbors", MeasureKind::Common},
      {"jaccard", MeasureKind::Jaccard},
      {"delta", MeasureKind::Delta},
      {"adamic-adar", MeasureKind::AdamicAdar},
      {"adamicadar", MeasureKind::AdamicAdar},
      {"aa", MeasureKind::AdamicAdar},
      {"linear", MeasureKind::Linear},
      {"preferential", MeasureKind::Preferential},
      {"preferential-attachment", MeasureKind::Preferential},
      {"katz", MeasureKind::Katz},
      {"rwr", MeasureKind::RandomWalkRestart},
      {"random-walk-restart", MeasureKind::RandomWalkRestart},
      {"simrank", MeasureKind::SimRank},
      {"max", MeasureKind::Max},
      {"proportional", MeasureKind::Proportional},
      {"temporal", MeasureKind::TemporalProportional},
      {"temporal-proportional", MeasureKind::TemporalProportional},
  };
  auto it = aliases.find(key);
  if (it == aliases.end()) throw ConfigError("unknown measure '" + std::string(name) + "'");
  return it->second;
}

/// Numeric knobs shared by all measures; each measure reads only its own.
struct MeasureParams {
  double katz_gamma = 2.0;
  unsigned katz_max_walk_length = 6;
  double rwr_alpha = 0.15;
  double simrank_gamma = 0.8;
  double epsilon = 0.5;
  double temporal_init = 1e-6;
  double tolerance = 1e-9;
  std::size_t max_iterations = 1000;

  friend bool operator==(const MeasureParams&, const MeasureParams&) = default;
};

/// A measure plus validated parameters.
class MeasureSpec {
 public:
  explicit MeasureSpec(MeasureKind kind, MeasureParams params = {})
      : kind_(kind), params_(params) {
    validate();
  }

  MeasureKind kind() const noexcept { return kind_; }
  const MeasureParams& params() const noexcept { return params_; }
  std::string_view name() const { return measure_name(kind_); }

  /// Measures whose directed value TS(u->v) differs from TS(v->u).
  bool is_directed() const noexcept {
    return kind_ == MeasureKind::RandomWalkRestart || kind_ == MeasureKind::Proportional ||
           kind_ == MeasureKind::TemporalProportional;
  }

  /// Measures computed by iterating to a tolerance.
  bool is_iterative() const noexcept {
    return kind_ == MeasureKind::RandomWalkRestart || kind_ == MeasureKind::SimRank ||
           kind_ == MeasureKind::Proportional;
  }

  friend bool operator==(const MeasureSpec&, const MeasureSpec&) = default;

 private:
  void validate() const {
    const auto& p = params_;
    auto reject = [](const std::string& msg) { throw ConfigError(msg); };
    if (!(p.katz_gamma > 1.0) || !std::isfinite(p.katz_gamma)) {
      reject("katz_gamma must be a finite real > 1");
    }
    if (p.katz_max_walk_length < 2 || p.katz_max_walk_length % 2 != 0) {
      reject("katz_max_walk_length must be an even integer >= 2");
    }
    if (!(p.rwr_alpha > 0.0 && p.rwr_alpha < 1.0)) reject("rwr_alpha must lie in (0,1)");
    if (!(p.simrank_gamma > 0.0 && p.simrank_gamma < 1.0)) {
      reject("simrank_gamma must lie in (0,1)");
    }
    if (!(p.epsilon > 0.0 && p.epsilon < 1.0)) reject("epsilon must lie in (0,1)");
    if (!(p.temporal_init >= 0.0) || !std::isfinite(p.temporal_init)) {
      reject("temporal_init must be a finite real >= 0");
    }
    if (!(p.tolerance > 0.0)) reject("tolerance must be > 0");
    if (p.max_iterations < 1) reject("max_iterations must be >= 1");
  }

  MeasureKind kind_;
  MeasureParams params_;
};

struct ConvergenceInfo {
  std::size_t iterations = 0;
  double residual = 0.0;
};

/// Scores on unordered person pairs; pairs not stored score 0.
class TieScoreTable {
 public:
  explicit TieScoreTable(MeasureSpec spec) : spec_(spec) {}

  const MeasureSpec& spec() const noexcept { return spec_; }

  void set(Tie tie, double score) { scores_[tie] = score; }
  double get(Tie tie) const {
    auto it = scores_.find(tie);
    return it == scores_.end() ? 0.0 : it->second;
  }
  bool contains(Tie tie) const { return scores_.count(tie) != 0; }
  std::size_t size() const noexcept { return scores_.size(); }
  bool empty() const noexcept { return scores_.empty(); }
  auto begin() const noexcept { return scores_.begin(); }
  auto end() const noexcept { return scores_.end(); }

  /// Set by iterative measures.
  std::optional<ConvergenceInfo> convergence;

 private:
  friend TieScoreTable score_all_impl(const BipartiteGraph&, const MeasureSpec&,
                                      const std::vector<Tie>&, std::size_t);
  MeasureSpec spec_;
  std::map<Tie, double> scores_;
};

// ---------------------------------------------------------------------------
// Closed-form measures.

inline double score_common(const BipartiteGraph& g, PersonId u, PersonId v) {
  return static_cast<double>(common_events(g, u, v).size());
}

/// |common| / |union|, with 0/0 read as 0.
inline double score_jaccard(const BipartiteGraph& g, PersonId u, PersonId v) {
  const double common = static_cast<double>(common_events(g, u, v).size());
  const double uni = static_cast<double>(g.degree(u) + g.degree(v)) - common;
  return uni == 0.0 ? 0.0 : common / uni;
}

inline double score_delta(const BipartiteGraph& g, PersonId u, PersonId v) {
  double total = 0.0;
  for (EventId e : common_events(g, u, v)) {
    const double n = static_cast<double>(g.event_size(e));
    total += 2.0 / (n * (n - 1.0));
  }
  return total;
}

/// Natural logarithm.
inline double score_adamic_adar(const BipartiteGraph& g, PersonId u, PersonId v) {
  double total = 0.0;
  for (EventId e : common_events(g, u, v)) {
    total += 1.0 / std::log(static_cast<double>(g.event_size(e)));
  }
  return total;
}

inline double score_linear(const BipartiteGraph& g, PersonId u, PersonId v) {
  double total = 0.0;
  for (EventId e : common_events(g, u, v)) total += 1.0 / static_cast<double>(g.event_size(e));
  return total;
}

inline double score_max(const BipartiteGraph& g, PersonId u, PersonId v) {
  double best = 0.0;
  for (EventId e : common_events(g, u, v)) {
    best = std::max(best, 1.0 / static_cast<double>(g.event_size(e)));
  }
  return best;
}

inline double score_preferential(const BipartiteGraph& g, PersonId u, PersonId v) {
  detail::check_pair(g, u, v);
  return static_cast<double>(g.degree(u)) * static_cast<double>(g.degree(v));
}

// ---------------------------------------------------------------------------
// Katz: walks of even length 2..L from u, each weighted gamma^-length.

/// Katz scores from `source` to every person, indexed by PersonId.
inline std::vector<double> katz_from(const BipartiteGraph& g, PersonId source,
                                     const MeasureSpec& spec) {
  g.check_person(source);
  const auto& p = spec.params();
  std::vector<double> walks(g.num_people(), 0.0);
  std::vector<double> at_events(g.num_events(), 0.0);
  std::vector<double> acc(g.num_people(), 0.0);
  walks[source.value] = 1.0;
  const double step_weight = 1.0 / (p.katz_gamma * p.katz_gamma);
  double weight = 1.0;
  for (unsigned len = 2; len <= p.katz_max_walk_length; len += 2) {
    for (std::uint32_t e = 0; e < g.num_events(); ++e) {
      double s = 0.0;
      for (PersonId w : g.participants(EventId{e})) s += walks[w.value];
      at_events[e] = s;
    }
    for (std::uint32_t w = 0; w < g.num_people(); ++w) {
      double s = 0.0;
      for (EventId e : g.events_of(PersonId{w})) s += at_events[e.value];
      walks[w] = s;
    }
    weight *= step_weight;
    for (std::uint32_t w = 0; w < g.num_people(); ++w) acc[w] += weight * walks[w];
  }
  return acc;
}

inline double score_katz(const BipartiteGraph& g, PersonId u, PersonId v, const MeasureSpec& spec) {
  detail::check_pair(g, u, v);
  return katz_from(g, u, spec)[v.value];
}

// ---------------------------------------------------------------------------
// Random walk with restart on the bipartite graph.

struct RwrResult {
  /// Stationary probability of every person node.
  std::vector<double> people;
  ConvergenceInfo info;
};

/// Power iteration for the walk that restarts at `source` with probability
/// alpha. A node without neighbours sends its continuing mass back to source.
inline RwrResult rwr_from(const BipartiteGraph& g, PersonId source, const MeasureSpec& spec) {
  g.check_person(source);
  const auto& p = spec.params();
  const std::size_t n = g.num_people();
  const std::size_t m = g.num_events();
  std::vector<double> person(n, 0.0), event(m, 0.0), next_person(n), next_event(m);
  person[source.value] = 1.0;
  const double keep = 1.0 - p.rwr_alpha;
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t it = 1; it <= p.max_iterations; ++it) {
    std::fill(next_person.begin(), next_person.end(), 0.0);
    std::fill(next_event.begin(), next_event.end(), 0.0);
    double stranded = 0.0;
    for (std::uint32_t w = 0; w < n; ++w) {
      if (person[w] == 0.0) continue;
      const auto evs = g.events_of(PersonId{w});
      if (evs.empty()) {
        stranded += person[w];
        continue;
      }
      const double share = keep * person[w] / static_cast<double>(evs.size());
      for (EventId e : evs) next_event[e.value] += share;
    }
    for (std::uint32_t e = 0; e < m; ++e) {
      if (event[e] == 0.0) continue;
      const auto ppl = g.participants(EventId{e});
      if (ppl.empty()) {
        stranded += event[e];
        continue;
      }
      const double share = keep * event[e] / static_cast<double>(ppl.size());
      for (PersonId w : ppl) next_person[w.value] += share;
    }
    next_person[source.value] += p.rwr_alpha + keep * stranded;

    residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) residual += std::abs(next_person[i] - person[i]);
    for (std::size_t i = 0; i < m; ++i) residual += std::abs(next_event[i] - event[i]);
    person.swap(next_person);
    event.swap(next_event);
    if (residual < p.tolerance) return {std::move(person), {it, residual}};
  }
  throw ConvergenceError("random walk with restart from '" + g.person_label(source) +
                             "' did not converge: residual " + std::to_string(residual),
                         residual, p.max_iterations);
}

/// Directed value: stationary mass at v for the walk restarting at u.
inline double score_rwr(const BipartiteGraph& g, PersonId u, PersonId v, const MeasureSpec& spec) {
  detail::check_pair(g, u, v);
  try {
    return rwr_from(g, u, spec).people[v.value];
  } catch (const ConvergenceError& e) {
    throw ConvergenceError("rwr(" + g.person_label(u) + " -> " + g.person_label(v) +
                               "): " + e.what(),
                           e.residual(), e.iterations());
  }
}

// ---------------------------------------------------------------------------
// SimRank on the bipartite graph (people compare through events and back).

struct SimRankResult {
  std::size_t n = 0;
  /// Row-major n x n person similarity matrix.
  std::vector<double> people;
  ConvergenceInfo info;

  double at(PersonId a, PersonId b) const { return people[a.value * n + b.value]; }
};

inline SimRankResult simrank_matrix(const BipartiteGraph& g, const MeasureSpec& spec) {
  const auto& p = spec.params();
  const std::size_t n = g.num_people();
  const std::size_t m = g.num_events();
  const double gamma = p.simrank_gamma;

  std::vector<double> sl(n * n, 0.0), sr(m * m, 0.0);
  for (std::size_t i = 0; i < n; ++i) sl[i * n + i] = 1.0;
  for (std::size_t i = 0; i < m; ++i) sr[i * m + i] = 1.0;
  std::vector<double> nl(n * n), nr(m * m), tmp;

  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t it = 1; it <= p.max_iterations; ++it) {
    // People: tmp[a][Q] = sum_{P in Γ(a)} sr[P][Q].
    tmp.assign(n * m, 0.0);
    for (std::uint32_t a = 0; a < n; ++a) {
      for (EventId pe : g.events_of(PersonId{a})) {
        for (std::size_t q = 0; q < m; ++q) tmp[a * m + q] += sr[pe.value * m + q];
      }
    }
    for (std::uint32_t a = 0; a < n; ++a) {
      nl[a * n + a] = 1.0;
      const double da = static_cast<double>(g.degree(PersonId{a}));
      for (std::uint32_t b = a + 1; b < n; ++b) {
        const double db = static_cast<double>(g.degree(PersonId{b}));
        double s = 0.0;
        if (da > 0 && db > 0) {
          for (EventId q : g.events_of(PersonId{b})) s += tmp[a * m + q.value];
          s *= gamma / (da * db);
        }
        nl[a * n + b] = nl[b * n + a] = s;
      }
    }
    // Events: tmp[P][b] = sum_{a in P} sl[a][b].
    tmp.assign(m * n, 0.0);
    for (std::uint32_t e = 0; e < m; ++e) {
      for (PersonId a : g.participants(EventId{e})) {
        for (std::size_t b = 0; b < n; ++b) tmp[e * n + b] += sl[a.value * n + b];
      }
    }
    for (std::uint32_t e = 0; e < m; ++e) {
      nr[e * m + e] = 1.0;
      const double de = static_cast<double>(g.event_size(EventId{e}));
      for (std::uint32_t f = e + 1; f < m; ++f) {
        const double df = static_cast<double>(g.event_size(EventId{f}));
        double s = 0.0;
        if (de > 0 && df > 0) {
          for (PersonId b : g.participants(EventId{f})) s += tmp[e * n + b.value];
          s *= gamma / (de * df);
        }
        nr[e * m + f] = nr[f * m + e] = s;
      }
    }

    residual = 0.0;
    for (std::size_t i = 0; i < sl.size(); ++i) residual = std::max(residual, std::abs(nl[i] - sl[i]));
    for (std::size_t i = 0; i < sr.size(); ++i) residual = std::max(residual, std::abs(nr[i] - sr[i]));
    sl.swap(nl);
    sr.swap(nr);
    if (residual < p.tolerance) return {n, std::move(sl), {it, residual}};
  }
  throw ConvergenceError("simrank did not converge: residual " + std::to_string(residual),
                         residual, p.max_iterations);
}

/// TS(u,u) = 1; people without events score 0 against everyone else.
inline double score_simrank(const BipartiteGraph& g, PersonId u, PersonId v,
                            const MeasureSpec& spec) {
  g.check_person(u);
  g.check_person(v);
  if (u == v) return 1.0;
  return simrank_matrix(g, spec).at(u, v);
}

// ---------------------------------------------------------------------------
// Proportional: per-person fixed point.

struct ProportionalRow {
  /// Co-attendees of the source with their directed scores, ascending by id.
  std::vector<std::pair<PersonId, double>> scores;
  ConvergenceInfo info;
};

/// Iterates TS(u,v) <- sum_{P common} [eps/|P| + (1-eps) TS(u,v) / sum_w TS(u,w)]
/// from TS(u,v) = sum_{P common} 1/|P|. Rows for different sources are
/// independent, so a synchronous sweep over one row is the full update for it.
inline ProportionalRow proportional_row(const BipartiteGraph& g, PersonId u,
                                        const MeasureSpec& spec) {
  g.check_person(u);
  const auto& p = spec.params();
  std::map<PersonId, std::pair<double, double>> terms;  // partner -> (sum 1/|P|, common count)
  for (EventId e : g.events_of(u)) {
    const double inv = 1.0 / static_cast<double>(g.event_size(e));
    for (PersonId w : g.participants(e)) {
      if (w == u) continue;
      auto& t = terms[w];
      t.first += inv;
      t.second += 1.0;
    }
  }
  ProportionalRow row;
  if (terms.empty()) return row;

  std::vector<double> base, coef, x;
  for (const auto& [w, t] : terms) {
    row.scores.emplace_back(w, 0.0);
    base.push_back(p.epsilon * t.first);
    coef.push_back((1.0 - p.epsilon) * t.second);
    x.push_back(t.first);
  }
  std::vector<double> next(x.size());
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t it = 1; it <= p.max_iterations; ++it) {
    double denom = 0.0;
    for (double xi : x) denom += xi;
    residual = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      next[i] = base[i] + coef[i] * x[i] / denom;
      residual = std::max(residual, std::abs(next[i] - x[i]));
    }
    x.swap(next);
    if (residual < p.tolerance) {
      for (std::size_t i = 0; i < x.size(); ++i) row.scores[i].second = x[i];
      row.info = {it, residual};
      return row;
    }
  }
  throw ConvergenceError("proportional row of '" + g.person_label(u) +
                             "' did not converge: residual " + std::to_string(residual),
                         residual, p.max_iterations);
}

namespace detail {

inline double row_value(const ProportionalRow& row, PersonId v) {
  auto it = std::lower_bound(row.scores.begin(), row.scores.end(), v,
                             [](const auto& entry, PersonId key) { return entry.first < key; });
  return (it != row.scores.end() && it->first == v) ? it->second : 0.0;
}

inline std::uint64_t pair_key(PersonId u, PersonId v) {
  return (static_cast<std::uint64_t>(u.value) << 32) | v.value;
}

}  // namespace detail

/// Whole-table Proportional, symmetrized by averaging the two directions.
inline TieScoreTable score_proportional(const BipartiteGraph& g, const MeasureSpec& spec) {
  TieScoreTable table(spec);
  std::vector<ProportionalRow> rows(g.num_people());
  ConvergenceInfo info;
  for (std::uint32_t u = 0; u < g.num_people(); ++u) {
    rows[u] = proportional_row(g, PersonId{u}, spec);
    info.iterations = std::max(info.iterations, rows[u].info.iterations);
    info.residual = std::max(info.residual, rows[u].info.residual);
  }
  for (std::uint32_t u = 0; u < g.num_people(); ++u) {
    for (const auto& [v, s] : rows[u].scores) {
      if (v.value > u) table.set(Tie(PersonId{u}, v), 0.5 * (s + detail::row_value(rows[v.value], PersonId{u})));
    }
  }
  table.convergence = info;
  return table;
}

/// Directed Temporal Proportional values for every ordered pair that
/// co-attended at least one event.
inline std::unordered_map<std::uint64_t, double> temporal_directed(const BipartiteGraph& g,
                                                                   const MeasureSpec& spec) {
  const auto& p = spec.params();
  for (std::uint32_t e = 0; e < g.num_events(); ++e) {
    if (!g.event_time(EventId{e})) {
      throw InputError("event '" + g.event_label(EventId{e}) +
                       "' has no timestamp; the temporal measure needs one on every event");
    }
  }
  std::unordered_map<std::uint64_t, double> ts;
  auto prev = [&](PersonId a, PersonId b) {
    auto it = ts.find(detail::pair_key(a, b));
    return it == ts.end() ? p.temporal_init : it->second;
  };
  std::vector<std::pair<std::uint64_t, double>> updates;
  for (EventId e : g.events_by_time()) {
    const auto ppl = g.participants(e);
    const std::size_t k = ppl.size();
    if (k < 2) continue;
    updates.clear();
    for (PersonId a : ppl) {
      double denom = 0.0;
      for (PersonId w : ppl) {
        if (w != a) denom += prev(a, w);
      }
      for (PersonId b : ppl) {
        if (b == a) continue;
        const double share =
            denom > 0.0 ? prev(a, b) / denom : 1.0 / static_cast<double>(k - 1);
        updates.emplace_back(detail::pair_key(a, b),
                             p.epsilon / static_cast<double>(k) + (1.0 - p.epsilon) * share);
      }
    }
    for (const auto& [key, value] : updates) ts[key] = value;
  }
  return ts;
}

/// Pairs that never co-attended report 0.
inline TieScoreTable score_temporal(const BipartiteGraph& g, const MeasureSpec& spec) {
  TieScoreTable table(spec);
  const auto ts = temporal_directed(g, spec);
  for (const auto& [key, value] : ts) {
    const PersonId a{static_cast<std::uint32_t>(key >> 32)};
    const PersonId b{static_cast<std::uint32_t>(key & 0xffffffffu)};
    if (a < b) {
      auto back = ts.find(detail::pair_key(b, a));
      table.set(Tie(a, b), 0.5 * (value + back->second));
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Uniform entry points.

/// TS(u,v) for any measure. Directed measures return the u -> v value.
inline double tie_strength(const BipartiteGraph& g, PersonId u, PersonId v,
                           const MeasureSpec& spec) {
  switch (spec.kind()) {
    case MeasureKind::Common: return score_common(g, u, v);
    case MeasureKind::Jaccard: return score_jaccard(g, u, v);
    case MeasureKind::Delta: return score_delta(g, u, v);
    case MeasureKind::AdamicAdar: return score_adamic_adar(g, u, v);
    case MeasureKind::Linear: return score_linear(g, u, v);
    case MeasureKind::Preferential: return score_preferential(g, u, v);
    case MeasureKind::Katz: return score_katz(g, u, v, spec);
    case MeasureKind::RandomWalkRestart: return score_rwr(g, u, v, spec);
    case MeasureKind::SimRank:
      detail::check_pair(g, u, v);
      return score_simrank(g, u, v, spec);
    case MeasureKind::Max: return score_max(g, u, v);
    case MeasureKind::Proportional:
      detail::check_pair(g, u, v);
      return detail::row_value(proportional_row(g, u, spec), v);
    case MeasureKind::TemporalProportional: {
      detail::check_pair(g, u, v);
      const auto ts = temporal_directed(g, spec);
      auto it = ts.find(detail::pair_key(u, v));
      return it == ts.end() ? 0.0 : it->second;
    }
  }
  throw ConfigError("unhandled measure");
}

enum class PairScope {
  /// Pairs with at least one common event.
  Ties,
  /// Every unordered pair of people.
  AllPairs,
};

struct ScoreOptions {
  PairScope scope = PairScope::Ties;
  /// 0 means one worker per hardware thread.
  std::size_t threads = 0;
};

inline std::vector<Tie> scored_pairs(const BipartiteGraph& g, PairScope scope) {
  if (scope == PairScope::Ties) return all_ties(g);
  std::vector<Tie> out;
  for (std::uint32_t a = 0; a < g.num_people(); ++a) {
    for (std::uint32_t b = a + 1; b < g.num_people(); ++b) out.emplace_back(PersonId{a}, PersonId{b});
  }
  return out;
}

inline TieScoreTable score_all_impl(const BipartiteGraph& g, const MeasureSpec& spec,
                                    const std::vector<Tie>& pairs, std::size_t threads) {
  TieScoreTable table(spec);
  std::vector<double> values(pairs.size(), 0.0);
  const std::size_t n = g.num_people();

  switch (spec.kind()) {
    case MeasureKind::Proportional: {
      const TieScoreTable full = score_proportional(g, spec);
      for (std::size_t i = 0; i < pairs.size(); ++i) values[i] = full.get(pairs[i]);
      table.convergence = full.convergence;
      break;
    }
    case MeasureKind::TemporalProportional: {
      const TieScoreTable full = score_temporal(g, spec);
      for (std::size_t i = 0; i < pairs.size(); ++i) values[i] = full.get(pairs[i]);
      break;
    }
    case MeasureKind::SimRank: {
      const SimRankResult sim = simrank_matrix(g, spec);
      for (std::size_t i = 0; i < pairs.size(); ++i) values[i] = sim.at(pairs[i].first, pairs[i].second);
      table.convergence = sim.info;
      break;
    }
    case MeasureKind::Katz:
    case MeasureKind::RandomWalkRestart: {
      // One source computation per person in a requested pair. `forward`
      // holds first->second, `backward` second->first; each slot has a
      // single writer, so the result does not depend on the thread count.
      const bool directed = spec.kind() == MeasureKind::RandomWalkRestart;
      std::vector<std::vector<std::size_t>> by_source(n);
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        by_source[pairs[i].first.value].push_back(i);
        if (directed) by_source[pairs[i].second.value].push_back(i);
      }
      std::vector<double> backward(pairs.size(), 0.0);
      std::vector<ConvergenceInfo> infos(n);
      parallel_blocks(n, threads, [&](std::size_t begin, std::size_t end, std::size_t) {
        for (std::size_t s = begin; s < end; ++s) {
          if (by_source[s].empty()) continue;
          const PersonId src{static_cast<std::uint32_t>(s)};
          std::vector<double> reach;
          if (directed) {
            auto r = rwr_from(g, src, spec);
            infos[s] = r.info;
            reach = std::move(r.people);
          } else {
            reach = katz_from(g, src, spec);
          }
          for (std::size_t i : by_source[s]) {
            if (pairs[i].first == src) {
              values[i] = reach[pairs[i].second.value];
            } else {
              backward[i] = reach[pairs[i].first.value];
            }
          }
        }
      });
      if (directed) {
        ConvergenceInfo worst;
        for (const auto& inf : infos) {
          worst.iterations = std::max(worst.iterations, inf.iterations);
          worst.residual = std::max(worst.residual, inf.residual);
        }
        table.convergence = worst;
        for (std::size_t i = 0; i < pairs.size(); ++i) values[i] = 0.5 * (values[i] + backward[i]);
      }
      break;
    }
    default:
      parallel_blocks(pairs.size(), threads, [&](std::size_t begin, std::size_t end, std::size_t) {
        for (std::size_t i = begin; i < end; ++i) {
          values[i] = tie_strength(g, pairs[i].first, pairs[i].second, spec);
        }
      });
      break;
  }

  for (std::size_t i = 0; i < pairs.size(); ++i) {
    table.scores_.emplace_hint(table.scores_.end(), pairs[i], values[i]);
  }
  return table;
}

/// Scores every tie (or every pair, by option). Directed measures are
/// symmetrized by averaging both directions.
inline TieScoreTable score_all(const BipartiteGraph& g, const MeasureSpec& spec,
                               ScoreOptions options = {}) {
  return score_all_impl(g, spec, scored_pairs(g, options.scope), options.threads);
}

// ---------------------------------------------------------------------------
// g∘h characterization of the measures that satisfy every axiom.

enum class Aggregator { Sum, Max };

struct CharacterizedMeasure {
  Aggregator g = Aggregator::Sum;
  double (*h)(std::size_t) = nullptr;
  std::string_view h_formula;

  double evaluate(const TieProfile& profile) const {
    double out = 0.0;
    for (std::size_t n : profile) {
      const double value = h(n);
      out = g == Aggregator::Sum ? out + value : std::max(out, value);
    }
    return out;
  }

  /// Total strength a single n-person event creates: C(n,2) h(n).
  double single_event_total(std::size_t n) const {
    const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    return pairs * h(n);
  }
};

inline std::optional<CharacterizedMeasure> characterized_form(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::Common:
      return CharacterizedMeasure{Aggregator::Sum, [](std::size_t) { return 1.0; }, "1"};
    case MeasureKind::Delta:
      return CharacterizedMeasure{
          Aggregator::Sum,
          [](std::size_t n) {
            const double d = static_cast<double>(n);
            return 2.0 / (d * (d - 1.0));
          },
          "1/C(n,2)"};
    case MeasureKind::AdamicAdar:
      return CharacterizedMeasure{
          Aggregator::Sum, [](std::size_t n) { return 1.0 / std::log(static_cast<double>(n)); },
          "1/ln(n)"};
    case MeasureKind::Linear:
      return CharacterizedMeasure{
          Aggregator::Sum, [](std::size_t n) { return 1.0 / static_cast<double>(n); }, "1/n"};
    case MeasureKind::Max:
      return CharacterizedMeasure{
          Aggregator::Max, [](std::size_t n) { return 1.0 / static_cast<double>(n); }, "1/n"};
    default:
      return std::nullopt;
  }
}

}  // namespace tiestrength
