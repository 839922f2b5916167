#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "tiestrength/error.hpp"
#include "tiestrength/graph.hpp"
#include "tiestrength/measures.hpp"

namespace tiestrength {

namespace detail {

/// Number of tied pairs within runs of equal values of a sorted sequence.
template <typename It, typename Eq>
std::uint64_t tied_pairs(It first, It last, Eq eq) {
  std::uint64_t total = 0;
  while (first != last) {
    It run = first;
    std::uint64_t len = 0;
    while (run != last && eq(*run, *first)) {
      ++run;
      ++len;
    }
    total += len * (len - 1) / 2;
    first = run;
  }
  return total;
}

/// Stable merge sort that counts strict inversions.
inline std::uint64_t sort_counting_inversions(std::vector<double>& v, std::vector<double>& buf,
                                              std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t swaps = sort_counting_inversions(v, buf, lo, mid) +
                        sort_counting_inversions(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += mid - i;
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

}  // namespace detail

/// Kendall tau-b of two paired sequences in O(n log n) (Knight's method).
/// Returns 0 when either sequence is constant.
inline double kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InputError("kendall tau needs sequences of equal length");
  const std::size_t n = x.size();
  if (n < 2) throw InputError("kendall tau needs at least 2 keys");

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return x[a] != x[b] ? x[a] < x[b] : y[a] < y[b];
  });

  const std::uint64_t ties_x = detail::tied_pairs(
      idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] == x[b]; });
  const std::uint64_t ties_xy = detail::tied_pairs(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return x[a] == x[b] && y[a] == y[b];
  });

  std::vector<double> ys(n), buf(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[idx[i]];
  const std::uint64_t discordant = detail::sort_counting_inversions(ys, buf, 0, n);
  const std::uint64_t ties_y =
      detail::tied_pairs(ys.begin(), ys.end(), [](double a, double b) { return a == b; });

  const std::uint64_t pairs = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const auto numerator = static_cast<long double>(pairs) - static_cast<long double>(ties_x) -
                         static_cast<long double>(ties_y) + static_cast<long double>(ties_xy) -
                         2.0L * static_cast<long double>(discordant);
  const auto denom = static_cast<long double>(pairs - ties_x) * static_cast<long double>(pairs - ties_y);
  if (denom == 0.0L) return 0.0;
  return static_cast<double>(numerator / std::sqrt(denom));
}

/// Tau-b over the union of both tables' keys; a key missing from one table
/// reads as 0 there.
inline double kendall_tau(const TieScoreTable& a, const TieScoreTable& b) {
  std::set<Tie> keys;
  for (const auto& [t, s] : a) keys.insert(t);
  for (const auto& [t, s] : b) keys.insert(t);
  std::vector<double> x, y;
  x.reserve(keys.size());
  y.reserve(keys.size());
  for (const Tie& t : keys) {
    x.push_back(a.get(t));
    y.push_back(b.get(t));
  }
  return kendall_tau_b(x, y);
}

/// Pairwise tau-b between measures; NaN marks a measure that failed.
struct TauMatrix {
  std::vector<std::string> names;
  std::vector<std::vector<double>> values;
  /// One line per failed measure, naming it and the error.
  std::vector<std::string> missing;

  bool is_missing(std::size_t i) const { return std::isnan(values[i][i]); }
};

inline TauMatrix tau_matrix(const BipartiteGraph& g, const std::vector<MeasureSpec>& specs,
                            ScoreOptions options = {}) {
  if (specs.size() < 2) throw ConfigError("tau matrix needs at least 2 measures");
  const std::size_t k = specs.size();
  std::vector<std::optional<TieScoreTable>> tables(k);
  TauMatrix m;
  for (std::size_t i = 0; i < k; ++i) {
    m.names.emplace_back(specs[i].name());
    try {
      tables[i] = score_all(g, specs[i], options);
    } catch (const Error& e) {
      m.missing.push_back(std::string(specs[i].name()) + ": " + e.what());
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  m.values.assign(k, std::vector<double>(k, nan));
  for (std::size_t i = 0; i < k; ++i) {
    if (!tables[i]) continue;
    m.values[i][i] = 1.0;
    for (std::size_t j = i + 1; j < k; ++j) {
      if (!tables[j]) continue;
      m.values[i][j] = m.values[j][i] = kendall_tau(*tables[i], *tables[j]);
    }
  }
  return m;
}

/// Header row of measure names, one row per measure, cells as %.6f, NA for
/// failed measures. The first line records how ties were handled.
inline void write_tau_matrix(std::ostream& out, const TauMatrix& m, PairScope scope = PairScope::Ties) {
  out << "# kendall tau-b; keys="
      << (scope == PairScope::Ties ? "ties" : "all-pairs") << "; missing scores read as 0\n";
  out << "measure";
  for (const auto& n : m.names) out << ',' << n;
  out << '\n';
  char cell[64];
  for (std::size_t i = 0; i < m.names.size(); ++i) {
    out << m.names[i];
    for (std::size_t j = 0; j < m.names.size(); ++j) {
      if (std::isnan(m.values[i][j])) {
        out << ",NA";
      } else {
        std::snprintf(cell, sizeof cell, "%.6f", m.values[i][j]);
        out << ',' << cell;
      }
    }
    out << '\n';
  }
}

}  // namespace tiestrength
