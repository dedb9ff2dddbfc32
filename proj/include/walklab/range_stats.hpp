#pragma once

// Statistics of the range and its inner boundary at a checkpoint time n:
//
//   M(n)        max visit count among inner-boundary sites
//   M0(n)       max visit count among all sites (the favorite site's count)
//   L_n         number of inner-boundary sites
//   J_n(p)      inner-boundary sites visited exactly p times
//   Theta_n(d)  inner-boundary sites with K(n,x) >= beta_d * d * log n
//   ThetaTilde  boundary-relaxed variant evaluated at per-site visit times
//
// All functions here are pure reads of a RangeState / WalkPath.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "walklab/range_tracker.hpp"
#include "walklab/walk.hpp"

namespace walklab {

inline double beta_from_p(double p) {
  if (!(p > 0.0) || !(p < 1.0))
    throw std::invalid_argument("beta_from_p: probability must lie strictly in (0,1)");
  return 1.0 / (-std::log(p));
}

// h_k = beta * log P(T_0 < T_b ^ k) + 1
inline double h_k(double beta, double p_truncated) {
  if (!(p_truncated > 0.0) || !(p_truncated < 1.0))
    throw std::invalid_argument("h_k: truncated probability must lie strictly in (0,1)");
  if (!(beta > 0.0)) throw std::invalid_argument("h_k: beta must be positive");
  return beta * std::log(p_truncated) + 1.0;
}

struct BetaConstant {
  enum class Source { ExactBracket, MonteCarlo, UserSupplied };
  double value = 0.0;       // 1 / (-log p_estimate)
  Source source = Source::UserSupplied;
  double p_estimate = 0.0;  // the underlying P(T_0 < T_b)

  static BetaConstant from_p(double p, Source src) {
    BetaConstant b;
    b.p_estimate = p;
    b.value = beta_from_p(p);
    b.source = src;
    return b;
  }
};

struct StatSnapshot {
  std::uint64_t n = 0;
  std::uint64_t M = 0;           // falls back to 0 on an empty boundary
  std::uint64_t M0 = 0;
  std::uint64_t L = 0;
  std::uint64_t range_size = 0;
  std::map<int, std::uint64_t> J;
  std::map<double, std::uint64_t> Theta;
  std::map<double, std::uint64_t> ThetaTilde;  // filled by theta_tilde callers
};

inline StatSnapshot snapshot(const RangeState& state, const BetaConstant& beta,
                             const std::vector<double>& deltas, const std::vector<int>& ps) {
  if (state.step_index() < 2)
    throw std::invalid_argument("snapshot: requires step index >= 2 (log n must be positive)");
  if (deltas.empty()) throw std::invalid_argument("snapshot: empty delta list");
  for (double d : deltas)
    if (!(d > 0.0) || !(d < 1.0)) throw std::invalid_argument("snapshot: deltas must be in (0,1)");
  for (int p : ps)
    if (p < 1) throw std::invalid_argument("snapshot: multiplicities must be >= 1");

  StatSnapshot out;
  out.n = state.step_index();
  out.range_size = state.range_size();
  out.L = state.boundary_count();

  const double logn = std::log(static_cast<double>(out.n));
  std::vector<double> thresholds;
  thresholds.reserve(deltas.size());
  // ties count (K >= beta * delta * log n); the tiny relief keeps an exact
  // integer tie included when the rounded product lands one ulp high
  for (double d : deltas) {
    const double thr = beta.value * d * logn;
    thresholds.push_back(thr - 1e-9 * std::max(1.0, std::abs(thr)));
  }
  std::vector<std::uint64_t> theta_counts(deltas.size(), 0);
  std::vector<std::uint64_t> j_counts(ps.size(), 0);

  const int full = 2 * state.dimension();
  state.for_each_site([&](std::uint64_t, std::uint32_t visits, std::uint8_t nbrs) {
    if (visits > out.M0) out.M0 = visits;
    if (nbrs >= full) return;  // interior site
    if (visits > out.M) out.M = visits;
    for (std::size_t i = 0; i < thresholds.size(); ++i)
      if (static_cast<double>(visits) >= thresholds[i]) ++theta_counts[i];
    for (std::size_t i = 0; i < ps.size(); ++i)
      if (visits == static_cast<std::uint32_t>(ps[i])) ++j_counts[i];
  });

  for (std::size_t i = 0; i < deltas.size(); ++i) out.Theta[deltas[i]] = theta_counts[i];
  for (std::size_t i = 0; i < ps.size(); ++i) out.J[ps[i]] = j_counts[i];
  return out;
}

// Full multiplicity histogram of the inner boundary; sums to L by construction
// (used by audit mode to check sum_p J(p) = L).
inline std::map<std::uint32_t, std::uint64_t> boundary_multiplicities(const RangeState& state) {
  std::map<std::uint32_t, std::uint64_t> hist;
  const int full = 2 * state.dimension();
  state.for_each_site([&](std::uint64_t, std::uint32_t visits, std::uint8_t nbrs) {
    if (nbrs < full) ++hist[visits];
  });
  return hist;
}

// --- visit-time queries over a materialized path ---------------------------

// Per-site ordered visit times of a path; supports T_x^p queries with the
// convention T_x^0 = first arrival (so T_x^p is the (p+1)-th presence at x).
class VisitIndex {
 public:
  explicit VisitIndex(const WalkPath& path) : packing_(path.d) {
    for (std::uint64_t t = 0; t < path.points.size(); ++t)
      times_[packing_.pack(path.points[t])].push_back(t);
  }

  std::optional<std::uint64_t> visit_time(const LatticePoint& x, std::uint64_t p) const {
    if (!packing_.in_range(x)) return std::nullopt;
    const auto it = times_.find(packing_.pack(x));
    if (it == times_.end() || it->second.size() <= p) return std::nullopt;
    return it->second[p];
  }

  const std::vector<std::uint64_t>* times_for(std::uint64_t key) const {
    const auto it = times_.find(key);
    return it == times_.end() ? nullptr : &it->second;
  }

  const SitePacking& packing() const { return packing_; }

 private:
  SitePacking packing_;
  std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> times_;
};

// ThetaTilde_n(beta): with q = ceil(beta * log(n/2)), counts sites visited at
// least q times by n that are inner-boundary points of R(0, t) at the time t
// of their q-th presence.  Boundary status at time t is read off a single
// forward replay of the path.
//
// log(n/2) means the logarithm of n/2 here, and t is the time of the q-th
// presence (1-indexed), i.e. T_x^{q-1} in the T_x^0-first-arrival convention.
inline std::uint64_t theta_tilde(const WalkPath& path, double beta, std::uint64_t n) {
  if (n != path.steps())
    throw std::invalid_argument("theta_tilde: n must equal the path length - 1");
  if (n < 2) throw std::invalid_argument("theta_tilde: requires n >= 2");
  const double raw = beta * std::log(static_cast<double>(n) / 2.0);
  const std::uint64_t q = raw <= 0.0 ? 1 : static_cast<std::uint64_t>(std::ceil(raw));

  VisitIndex index(path);
  // collect (t, x) queries: t = time of the q-th presence of x
  struct Query {
    std::uint64_t t;
    LatticePoint x;
  };
  std::vector<Query> queries;
  const SitePacking& packing = index.packing();
  std::unordered_map<std::uint64_t, bool> seen;
  for (const LatticePoint& pt : path.points) {
    const std::uint64_t key = packing.pack(pt);
    if (!seen.emplace(key, true).second) continue;
    const auto* times = index.times_for(key);
    if (times == nullptr || times->size() < q) continue;  // K(n,x) < q
    queries.push_back({(*times)[q - 1], pt});
  }
  std::sort(queries.begin(), queries.end(),
            [](const Query& a, const Query& b) { return a.t < b.t; });

  std::uint64_t count = 0;
  RangeState replay(path.d);
  std::size_t qi = 0;
  for (std::uint64_t t = 0; t <= n && qi < queries.size(); ++t) {
    if (t > 0) replay.advance(path.points[t]);
    while (qi < queries.size() && queries[qi].t == t) {
      if (replay.is_inner_boundary(queries[qi].x)) ++count;
      ++qi;
    }
  }
  return count;
}

// theta_tilde over a tracker that retained visit times (streaming experiments
// keep a direction log instead of a full path).
inline std::uint64_t theta_tilde(const DirectionLog& log, double beta) {
  const WalkPath path = log.materialize();
  return theta_tilde(path, beta, path.steps());
}

}  // namespace walklab
