#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tiestrength/error.hpp"
#include "tiestrength/graph.hpp"
#include "tiestrength/measures.hpp"
#include "tiestrength/parallel.hpp"

namespace tiestrength {

enum class OrderRelation { Less, Greater, Equal, Incomparable };

inline std::string_view relation_name(OrderRelation r) {
  switch (r) {
    case OrderRelation::Less: return "less";
    case OrderRelation::Greater: return "greater";
    case OrderRelation::Equal: return "equal";
    case OrderRelation::Incomparable: return "incomparable";
  }
  return "unknown";
}

namespace detail {

/// a dominates b: at least as many events, and each of the first |b| entries
/// of a is no larger than the matching entry of b.
inline bool dominates(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.size() < b.size()) return false;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (a[i] > b[i]) return false;
  }
  return true;
}

inline OrderRelation compare_sorted(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  const bool ab = dominates(a, b);
  const bool ba = dominates(b, a);
  if (ab && ba) return OrderRelation::Equal;
  if (ab) return OrderRelation::Greater;
  if (ba) return OrderRelation::Less;
  return OrderRelation::Incomparable;
}

}  // namespace detail

inline OrderRelation compare_profiles(const TieProfile& a, const TieProfile& b) {
  return detail::compare_sorted(a.sizes(), b.sizes());
}

/// Raw-sequence overload; rejects sequences that are not sorted ascending.
inline OrderRelation compare_profiles(std::span<const std::size_t> a,
                                      std::span<const std::size_t> b) {
  auto check = [](std::span<const std::size_t> s) {
    if (!std::is_sorted(s.begin(), s.end())) {
      throw InputError("profile must be sorted ascending");
    }
  };
  check(a);
  check(b);
  return detail::compare_sorted(a, b);
}

struct CensusResult {
  std::uint64_t total = 0;
  /// Incomparable pairs, or strict conflicts.
  std::uint64_t count = 0;
  /// Incomparability census: pairs with equal profiles (counted comparable).
  /// Conflict census: order-strict pairs on which the scores tie.
  std::uint64_t secondary = 0;

  double percentage() const {
    return total == 0 ? 0.0 : 100.0 * static_cast<double>(count) / static_cast<double>(total);
  }

  friend bool operator==(const CensusResult&, const CensusResult&) = default;
};

inline std::vector<TieProfile> tie_profiles(const BipartiteGraph& g, const std::vector<Tie>& ties) {
  std::vector<TieProfile> out;
  out.reserve(ties.size());
  for (const Tie& t : ties) out.push_back(tie_profile(g, t.first, t.second));
  return out;
}

/// Counts unordered pairs of the given profiles the order leaves incomparable.
/// Identical profiles are grouped first, so the comparison loop runs over
/// distinct profiles and weights each class pair by its multiplicities.
inline CensusResult incomparability_census(std::span<const TieProfile> profiles,
                                           std::size_t threads = 0) {
  std::map<TieProfile, std::uint64_t, ProfileLengthLexLess> classes;
  for (const auto& p : profiles) ++classes[p];
  std::vector<const TieProfile*> distinct;
  std::vector<std::uint64_t> mult;
  for (const auto& [p, m] : classes) {
    distinct.push_back(&p);
    mult.push_back(m);
  }

  CensusResult result;
  const auto t = static_cast<std::uint64_t>(profiles.size());
  result.total = t < 2 ? 0 : t * (t - 1) / 2;
  for (std::uint64_t m : mult) result.secondary += m * (m - 1) / 2;

  if (threads == 0) threads = default_threads();
  std::vector<std::uint64_t> partial(std::max<std::size_t>(1, threads), 0);
  // Interleave rows so the triangular workload spreads evenly.
  const std::size_t d = distinct.size();
  parallel_blocks(partial.size(), partial.size(), [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t w = begin; w < end; ++w) {
      std::uint64_t local = 0;
      for (std::size_t i = w; i < d; i += partial.size()) {
        for (std::size_t j = i + 1; j < d; ++j) {
          if (compare_profiles(*distinct[i], *distinct[j]) == OrderRelation::Incomparable) {
            local += mult[i] * mult[j];
          }
        }
      }
      partial[w] = local;
    }
  });
  for (std::uint64_t c : partial) result.count += c;
  return result;
}

/// Census over all ties of the graph. Equal profiles count as comparable.
inline CensusResult incomparability_census(const BipartiteGraph& g, std::size_t threads = 0) {
  const auto profiles = tie_profiles(g, all_ties(g));
  return incomparability_census(std::span<const TieProfile>(profiles), threads);
}

/// Tie pairs that the order ranks strictly one way and the scores strictly the
/// other. Score ties on strictly ordered pairs go to `secondary`.
inline CensusResult conflict_census(const BipartiteGraph& g, const TieScoreTable& scores,
                                    std::size_t threads = 0) {
  const auto ties = all_ties(g);
  std::vector<double> value(ties.size());
  for (std::size_t i = 0; i < ties.size(); ++i) {
    if (!scores.contains(ties[i])) {
      throw InputError("score table has no entry for tie (" + g.person_label(ties[i].first) +
                       ", " + g.person_label(ties[i].second) + ")");
    }
    value[i] = scores.get(ties[i]);
  }
  const auto profiles = tie_profiles(g, ties);

  CensusResult result;
  const auto t = static_cast<std::uint64_t>(ties.size());
  result.total = t < 2 ? 0 : t * (t - 1) / 2;
  if (threads == 0) threads = default_threads();
  const std::size_t workers = std::max<std::size_t>(1, threads);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> partial(workers);
  parallel_blocks(workers, workers, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t w = begin; w < end; ++w) {
      std::uint64_t conflicts = 0, weak = 0;
      for (std::size_t i = w; i < ties.size(); i += workers) {
        for (std::size_t j = i + 1; j < ties.size(); ++j) {
          const auto rel = compare_profiles(profiles[i], profiles[j]);
          if (rel == OrderRelation::Greater || rel == OrderRelation::Less) {
            const double hi = rel == OrderRelation::Greater ? value[i] : value[j];
            const double lo = rel == OrderRelation::Greater ? value[j] : value[i];
            if (hi < lo) {
              ++conflicts;
            } else if (hi == lo) {
              ++weak;
            }
          }
        }
      }
      partial[w] = {conflicts, weak};
    }
  });
  for (const auto& [c, w] : partial) {
    result.count += c;
    result.secondary += w;
  }
  return result;
}

/// Appends `label,total,count,percentage` to a delimiter-separated results
/// file, writing the header when the file is new or empty.
inline void append_census_record(const std::string& path, const std::string& label,
                                 const CensusResult& result) {
  bool fresh = true;
  {
    std::ifstream probe(path, std::ios::binary | std::ios::ate);
    if (probe && probe.tellg() > 0) fresh = false;
  }
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw InputError("cannot write census results to '" + path + "'");
  if (fresh) out << "dataset,total,count,percentage\n";
  char pct[64];
  std::snprintf(pct, sizeof pct, "%.6f", result.percentage());
  out << label << ',' << result.total << ',' << result.count << ',' << pct << '\n';
}

// ---------------------------------------------------------------------------
// Linear extensions.

/// Profile -> value assignment with a deterministic tie-break for equal values.
class ExtensionTable {
 public:
  struct Entry {
    TieProfile profile;
    double value;
  };

  /// Adds or overwrites a profile's value.
  void assign(const TieProfile& profile, double value) {
    auto it = index_.find(profile);
    if (it != index_.end()) {
      entries_[it->second].value = value;
      return;
    }
    index_.emplace(profile, entries_.size());
    entries_.push_back({profile, value});
  }

  std::optional<double> value(const TieProfile& profile) const {
    auto it = index_.find(profile);
    if (it == index_.end()) return std::nullopt;
    return entries_[it->second].value;
  }

  /// Entries in assignment order.
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  /// Total-order comparison: by value, then by (length, lexicographic) key.
  static bool ranks_above(const Entry& a, const Entry& b) {
    if (a.value != b.value) return a.value > b.value;
    return ProfileLengthLexLess{}(b.profile, a.profile);
  }

 private:
  std::vector<Entry> entries_;
  std::map<TieProfile, std::size_t, ProfileLengthLexLess> index_;
};

/// Assigns values in ascending (length, lexicographic) order. The empty
/// profile seeds 0 and a single-event profile (n) seeds 1/(n-1). Every other
/// profile takes the midpoint between the largest assigned value strictly
/// below it and the smallest assigned value strictly above it; with nothing
/// below it takes half the value above, with nothing above the value below
/// plus one.
inline ExtensionTable build_linear_extension(std::span<const TieProfile> profiles) {
  std::vector<TieProfile> order(profiles.begin(), profiles.end());
  std::sort(order.begin(), order.end(), ProfileLengthLexLess{});
  order.erase(std::unique(order.begin(), order.end()), order.end());

  ExtensionTable table;
  for (const TieProfile& a : order) {
    if (a.empty()) {
      table.assign(a, 0.0);
      continue;
    }
    if (a.size() == 1) {
      table.assign(a, 1.0 / static_cast<double>(a[0] - 1));
      continue;
    }
    std::optional<double> below, above;
    for (const auto& e : table.entries()) {
      switch (compare_profiles(a, e.profile)) {
        case OrderRelation::Greater:
          if (!below || e.value > *below) below = e.value;
          break;
        case OrderRelation::Less:
          if (!above || e.value < *above) above = e.value;
          break;
        default:
          break;
      }
    }
    double v;
    if (below && above) {
      v = 0.5 * (*below + *above);
    } else if (above) {
      v = 0.5 * *above;
    } else if (below) {
      v = *below + 1.0;
    } else {
      v = 1.0;
    }
    table.assign(a, v);
  }
  return table;
}

struct ExtensionCheck {
  bool ok = true;
  /// (higher-in-order, lower-in-order) pairs the table ranks wrongly, or
  /// equal profiles with different values.
  std::vector<std::pair<TieProfile, TieProfile>> violations;
};

inline ExtensionCheck verify_linear_extension(const ExtensionTable& table) {
  ExtensionCheck check;
  const auto& es = table.entries();
  for (std::size_t i = 0; i < es.size(); ++i) {
    for (std::size_t j = i + 1; j < es.size(); ++j) {
      switch (compare_profiles(es[i].profile, es[j].profile)) {
        case OrderRelation::Greater:
          if (!ExtensionTable::ranks_above(es[i], es[j])) {
            check.violations.emplace_back(es[i].profile, es[j].profile);
          }
          break;
        case OrderRelation::Less:
          if (!ExtensionTable::ranks_above(es[j], es[i])) {
            check.violations.emplace_back(es[j].profile, es[i].profile);
          }
          break;
        case OrderRelation::Equal:
          if (es[i].value != es[j].value) check.violations.emplace_back(es[i].profile, es[j].profile);
          break;
        case OrderRelation::Incomparable:
          break;
      }
    }
  }
  check.ok = check.violations.empty();
  return check;
}

}  // namespace tiestrength
