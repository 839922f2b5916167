#pragma once

// Random inputs and brute-force reference implementations shared by the tests.
// Nothing here calls into the scoring code it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tiestrength/graph.hpp"

namespace oracle {

using tiestrength::EventRecord;

struct RawGraph {
  std::vector<EventRecord> events;
  std::vector<std::string> people;
};

/// Between 2 and max_people people, 1..max_events events, each event a random
/// subset of size 1..max_size.
inline RawGraph random_graph(std::mt19937_64& rng, int max_people = 8, int max_events = 6, int max_size = 5) {
  RawGraph g;
  const int n = 2 + static_cast<int>(rng() % static_cast<unsigned>(max_people - 1));
  const int m = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_events));
  for (int i = 0; i < n; ++i) g.people.push_back("v" + std::to_string(i));
  for (int j = 0; j < m; ++j) {
    std::vector<std::string> pool = g.people;
    std::shuffle(pool.begin(), pool.end(), rng);
    const int size = 1 + static_cast<int>(rng() % static_cast<unsigned>(std::min(n, max_size)));
    pool.resize(static_cast<std::size_t>(size));
    g.events.push_back({"ev" + std::to_string(j), j, pool});
  }
  return g;
}

inline std::set<std::string> members(const EventRecord& e) { return {e.participants.begin(), e.participants.end()}; }

/// Sizes of the events both a and b attend, ascending.
inline std::vector<std::size_t> common_sizes(const RawGraph& g, const std::string& a, const std::string& b) {
  std::vector<std::size_t> out;
  for (const auto& e : g.events) {
    const auto s = members(e);
    if (s.count(a) && s.count(b)) out.push_back(s.size());
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::size_t degree(const RawGraph& g, const std::string& a) {
  std::size_t d = 0;
  for (const auto& e : g.events) d += members(e).count(a);
  return d;
}

// Closed forms, straight from their definitions.
inline double common(const RawGraph& g, const std::string& a, const std::string& b) {
  return static_cast<double>(common_sizes(g, a, b).size());
}
inline double delta(const RawGraph& g, const std::string& a, const std::string& b) {
  double s = 0;
  for (auto n : common_sizes(g, a, b)) s += 1.0 / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
  return s;
}
inline double adamic_adar(const RawGraph& g, const std::string& a, const std::string& b) {
  double s = 0;
  for (auto n : common_sizes(g, a, b)) s += 1.0 / std::log(static_cast<double>(n));
  return s;
}
inline double linear(const RawGraph& g, const std::string& a, const std::string& b) {
  double s = 0;
  for (auto n : common_sizes(g, a, b)) s += 1.0 / static_cast<double>(n);
  return s;
}
inline double max_measure(const RawGraph& g, const std::string& a, const std::string& b) {
  double s = 0;
  for (auto n : common_sizes(g, a, b)) s = std::max(s, 1.0 / static_cast<double>(n));
  return s;
}
inline double jaccard(const RawGraph& g, const std::string& a, const std::string& b) {
  const double c = common(g, a, b);
  const double u = static_cast<double>(degree(g, a) + degree(g, b)) - c;
  return u == 0 ? 0.0 : c / u;
}

/// Katz sum over explicitly enumerated walks a -> b (person, event, person, ...).
inline double katz_walks(const RawGraph& g, const std::string& a, const std::string& b, double gamma,
                         unsigned max_len) {
  std::vector<std::set<std::string>> ev;
  for (const auto& e : g.events) ev.push_back(members(e));
  double total = 0.0;
  // Depth-first over person positions; `len` counts edges so far.
  auto dfs = [&](auto&& self, const std::string& at, unsigned len) -> void {
    if (len > 0 && at == b) total += std::pow(gamma, -static_cast<double>(len));
    if (len + 2 > max_len) return;
    for (const auto& e : ev) {
      if (!e.count(at)) continue;
      for (const auto& next : e) self(self, next, len + 2);
    }
  };
  dfs(dfs, a, 0);
  return total;
}

/// Dense Gaussian elimination with partial pivoting; solves A x = rhs.
inline std::vector<double> solve(std::vector<std::vector<double>> A, std::vector<double> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    }
    std::swap(A[c], A[piv]);
    std::swap(rhs[c], rhs[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || A[r][c] == 0.0) continue;
      const double f = A[r][c] / A[c][c];
      for (std::size_t k = c; k < n; ++k) A[r][k] -= f * A[c][k];
      rhs[r] -= f * rhs[c];
    }
  }
  for (std::size_t i = 0; i < n; ++i) rhs[i] /= A[i][i];
  return rhs;
}

/// Exact stationary vector of the restart walk from `src`, by solving
/// (I - (1-alpha) T) x = alpha e_src, where T moves uniformly to neighbours and
/// sends the mass of isolated nodes to src. Returns the person entries.
inline std::map<std::string, double> rwr_exact(const RawGraph& g, const std::string& src, double alpha) {
  const std::size_t n = g.people.size(), m = g.events.size(), N = n + m;
  std::map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < n; ++i) idx[g.people[i]] = i;
  std::vector<std::vector<std::size_t>> nbr(N);
  for (std::size_t j = 0; j < m; ++j) {
    for (const auto& p : members(g.events[j])) {
      nbr[idx[p]].push_back(n + j);
      nbr[n + j].push_back(idx[p]);
    }
  }
  std::vector<std::vector<double>> A(N, std::vector<double>(N, 0.0));
  for (std::size_t i = 0; i < N; ++i) A[i][i] = 1.0;
  const std::size_t s = idx.at(src);
  for (std::size_t from = 0; from < N; ++from) {
    if (nbr[from].empty()) {
      A[s][from] -= 1.0 - alpha;
      continue;
    }
    for (std::size_t to : nbr[from]) A[to][from] -= (1.0 - alpha) / static_cast<double>(nbr[from].size());
  }
  std::vector<double> rhs(N, 0.0);
  rhs[s] = alpha;
  const auto x = solve(A, rhs);
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < n; ++i) out[g.people[i]] = x[i];
  return out;
}

/// Bipartite SimRank by the textbook recursion, iterated a fixed number of times.
inline double simrank_naive(const RawGraph& g, const std::string& a, const std::string& b, double gamma,
                            int rounds = 400) {
  const std::size_t n = g.people.size(), m = g.events.size();
  std::map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < n; ++i) idx[g.people[i]] = i;
  std::vector<std::vector<std::size_t>> of_person(n), of_event(m);
  for (std::size_t j = 0; j < m; ++j) {
    for (const auto& p : members(g.events[j])) {
      of_person[idx[p]].push_back(j);
      of_event[j].push_back(idx[p]);
    }
  }
  std::vector<std::vector<double>> sp(n, std::vector<double>(n, 0.0)), se(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < n; ++i) sp[i][i] = 1;
  for (std::size_t i = 0; i < m; ++i) se[i][i] = 1;
  for (int r = 0; r < rounds; ++r) {
    auto np = sp;
    auto ne = se;
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        if (x == y) continue;
        double s = 0;
        for (auto p : of_person[x]) {
          for (auto q : of_person[y]) s += se[p][q];
        }
        const double d = static_cast<double>(of_person[x].size() * of_person[y].size());
        np[x][y] = d == 0 ? 0.0 : gamma * s / d;
      }
    }
    for (std::size_t x = 0; x < m; ++x) {
      for (std::size_t y = 0; y < m; ++y) {
        if (x == y) continue;
        double s = 0;
        for (auto p : of_event[x]) {
          for (auto q : of_event[y]) s += sp[p][q];
        }
        const double d = static_cast<double>(of_event[x].size() * of_event[y].size());
        ne[x][y] = d == 0 ? 0.0 : gamma * s / d;
      }
    }
    sp = np;
    se = ne;
  }
  return sp[idx.at(a)][idx.at(b)];
}

/// Directed Proportional row of `u` as the root of S = sum_v a_v S / (S - c_v)
/// found by bisection, with a_v = eps * sum 1/|P| and c_v = (1-eps) * common.
inline std::map<std::string, double> proportional_fixed_point(const RawGraph& g, const std::string& u,
                                                              double eps) {
  std::map<std::string, std::pair<double, double>> t;
  for (const auto& e : g.events) {
    const auto s = members(e);
    if (!s.count(u)) continue;
    for (const auto& w : s) {
      if (w == u) continue;
      t[w].first += eps / static_cast<double>(s.size());
      t[w].second += 1.0 - eps;
    }
  }
  std::map<std::string, double> out;
  if (t.empty()) return out;
  double cmax = 0;
  for (const auto& [w, ac] : t) cmax = std::max(cmax, ac.second);
  auto f = [&](double S) {
    double sum = 0;
    for (const auto& [w, ac] : t) sum += ac.first * S / (S - ac.second);
    return sum - S;
  };
  double lo = cmax * (1 + 1e-15) + 1e-300, hi = cmax + 1.0;
  while (f(hi) > 0) hi *= 2;
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0 ? lo : hi) = mid;
  }
  const double S = 0.5 * (lo + hi);
  for (const auto& [w, ac] : t) out[w] = ac.first / (1 - ac.second / S);
  return out;
}

/// a dominates b in the tie-profile order, by definition.
inline bool dominates(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  if (a.size() < b.size()) return false;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (a[i] > b[i]) return false;
  }
  return true;
}

inline std::uint64_t brute_incomparable(const std::vector<std::vector<std::size_t>>& profiles) {
  std::uint64_t c = 0;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    for (std::size_t j = i + 1; j < profiles.size(); ++j) {
      if (!dominates(profiles[i], profiles[j]) && !dominates(profiles[j], profiles[i])) ++c;
    }
  }
  return c;
}

/// Tau-b by counting every pair.
inline double kendall_quadratic(const std::vector<double>& x, const std::vector<double>& y) {
  long double conc = 0, disc = 0, tx = 0, ty = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j], dy = y[i] - y[j];
      if (dx == 0 && dy == 0) continue;
      if (dx == 0) {
        ++tx;
      } else if (dy == 0) {
        ++ty;
      } else if ((dx > 0) == (dy > 0)) {
        ++conc;
      } else {
        ++disc;
      }
    }
  }
  const long double d = std::sqrt((conc + disc + tx) * (conc + disc + ty));
  return d == 0 ? 0.0 : static_cast<double>((conc - disc) / d);
}

}  // namespace oracle
