#include "walklab/exact_oracle.hpp"

#include <array>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "walklab/lattice.hpp"
#include "walklab/range_tracker.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace walklab {

const char* statistic_name(OracleStatistic stat) {
  switch (stat) {
    case OracleStatistic::M: return "M";
    case OracleStatistic::M0: return "M0";
    case OracleStatistic::L: return "L";
    case OracleStatistic::RangeSize: return "range_size";
    case OracleStatistic::JMultiplicity: return "J";
    case OracleStatistic::ThetaCount: return "theta_count";
  }
  return "?";
}

const char* hit_event_name(HitEventKind kind) {
  switch (kind) {
    case HitEventKind::TruncatedReturn: return "T0<Tb^k";
    case HitEventKind::ReturnTailGT: return "T0>m";
    case HitEventKind::NeighborTailGT: return "Tb>m";
    case HitEventKind::JointTailGT: return "T0^Tb>m";
  }
  return "?";
}

namespace {

std::uint64_t checked_path_count(int d, int n) {
  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) {
    total *= static_cast<std::uint64_t>(2 * d);
    if (total > kOraclePathBudget)
      throw std::invalid_argument("oracle: (2d)^n exceeds the path budget");
  }
  return total;
}

using Tally = std::array<std::uint64_t, 64>;  // statistic values are <= n+1 <= 14

long long leaf_statistic(const RangeState& state, OracleStatistic stat,
                         const OracleParams& params) {
  const int full = 2 * state.dimension();
  switch (stat) {
    case OracleStatistic::L: return static_cast<long long>(state.boundary_count());
    case OracleStatistic::RangeSize: return static_cast<long long>(state.range_size());
    default: break;
  }
  std::uint64_t value = 0;
  state.for_each_site([&](std::uint64_t, std::uint32_t visits, std::uint8_t nbrs) {
    switch (stat) {
      case OracleStatistic::M0:
        if (visits > value) value = visits;
        break;
      case OracleStatistic::M:
        if (nbrs < full && visits > value) value = visits;
        break;
      case OracleStatistic::JMultiplicity:
        if (nbrs < full && visits == static_cast<std::uint32_t>(params.p)) ++value;
        break;
      case OracleStatistic::ThetaCount:
        if (nbrs < full && static_cast<double>(visits) >= params.threshold) ++value;
        break;
      default: break;
    }
  });
  return static_cast<long long>(value);
}

void dfs_statistic(const RangeState& state, int depth, int n, OracleStatistic stat,
                   const OracleParams& params, Tally& tally) {
  if (depth == n) {
    const long long v = leaf_statistic(state, stat, params);
    ++tally[static_cast<std::size_t>(v)];
    return;
  }
  for (int dir = 0; dir < 2 * state.dimension(); ++dir) {
    RangeState child = state;
    child.advance_dir(dir);
    dfs_statistic(child, depth + 1, n, stat, params, tally);
  }
}

ExactResult assemble(int d, int n, std::string name, const Tally& tally,
                     std::uint64_t total_paths) {
  ExactResult out;
  out.d = d;
  out.n = n;
  out.statistic = std::move(name);
  unsigned long long seen = 0;
  long long num = 0;
  for (std::size_t v = 0; v < tally.size(); ++v) {
    if (tally[v] == 0) continue;
    out.distribution[static_cast<long long>(v)] = tally[v];
    seen += tally[v];
    num += static_cast<long long>(v) * static_cast<long long>(tally[v]);
  }
  if (seen != total_paths) throw std::logic_error("oracle: path count mismatch");
  const unsigned long long den = total_paths;
  const unsigned long long g = std::gcd(static_cast<unsigned long long>(num < 0 ? -num : num), den);
  out.expectation_num = g == 0 ? num : num / static_cast<long long>(g);
  out.expectation_den = g == 0 ? den : den / g;
  return out;
}

}  // namespace

ExactResult enumerate(int d, int n, OracleStatistic stat, OracleParams params, int threads) {
  check_dimension(d);
  if (n < 0) throw std::invalid_argument("oracle: n must be >= 0");
  if (stat == OracleStatistic::JMultiplicity && params.p < 1)
    throw std::invalid_argument("oracle: multiplicity must be >= 1");
  const std::uint64_t total = checked_path_count(d, n);

  Tally tally{};
  if (n == 0) {
    RangeState state(d, {}, 64);
    ++tally[static_cast<std::size_t>(leaf_statistic(state, stat, params))];
    return assemble(d, n, statistic_name(stat), tally, total);
  }

  const int top = 2 * d;
  std::vector<Tally> partial(static_cast<std::size_t>(top));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads > 0 ? threads : 1)
#endif
  for (int dir = 0; dir < top; ++dir) {
    Tally local{};
    RangeState state(d, {}, 64);
    state.advance_dir(dir);
    dfs_statistic(state, 1, n, stat, params, local);
    partial[static_cast<std::size_t>(dir)] = local;
  }
  for (const Tally& part : partial)
    for (std::size_t v = 0; v < tally.size(); ++v) tally[v] += part[v];
  return assemble(d, n, statistic_name(stat), tally, total);
}

namespace {

struct HitDfs {
  int d;
  int decision_steps;
  HitEvent event;
  LatticePoint b;

  // returns the number of length-`decision_steps` suffix-extensions on which
  // the event holds, pruning as soon as the outcome is decided
  std::uint64_t walk(LatticePoint pos, int depth, bool zero_hit_pending_check) const {
    (void)zero_hit_pending_check;
    std::uint64_t weight = 1;
    for (int j = depth; j < decision_steps; ++j) weight *= static_cast<std::uint64_t>(2 * d);

    if (depth > 0) {
      const bool at_zero = pos == origin();
      const bool at_b = pos == b;
      switch (event.kind) {
        case HitEventKind::TruncatedReturn:
          if (at_zero) return weight;  // returned before b and before the cap
          if (at_b) return 0;
          break;
        case HitEventKind::ReturnTailGT:
          if (at_zero) return 0;
          break;
        case HitEventKind::NeighborTailGT:
          if (at_b) return 0;
          break;
        case HitEventKind::JointTailGT:
          if (at_zero || at_b) return 0;
          break;
      }
    }
    if (depth == decision_steps)
      return event.kind == HitEventKind::TruncatedReturn ? 0 : 1;  // tails survived

    std::uint64_t count = 0;
    for (int dir = 0; dir < 2 * d; ++dir) count += walk(neighbor(pos, dir), depth + 1, false);
    return count;
  }
};

}  // namespace

ExactResult enumerate_hitting(int d, HitEvent event, int horizon, int threads) {
  check_dimension(d);
  if (event.b_dir < 0 || event.b_dir >= 2 * d)
    throw std::invalid_argument("oracle: bad direction index");
  if (event.value < 1) throw std::invalid_argument("oracle: event parameter must be >= 1");
  const int decision = event.kind == HitEventKind::TruncatedReturn
                           ? static_cast<int>(event.value) - 1
                           : static_cast<int>(event.value);
  if (horizon < decision)
    throw std::invalid_argument("oracle: event not determined within the given horizon");
  const std::uint64_t total = checked_path_count(d, decision);

  HitDfs dfs{d, decision, event, neighbor(origin(), event.b_dir)};

  std::uint64_t hits = 0;
  if (decision == 0) {
    hits = dfs.walk(origin(), 0, false);
  } else {
    const int top = 2 * d;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) reduction(+ : hits) \
    num_threads(threads > 0 ? threads : 1)
#endif
    for (int dir = 0; dir < top; ++dir) hits += dfs.walk(neighbor(origin(), dir), 1, false);
  }

  ExactResult out;
  out.d = d;
  out.n = decision;
  out.statistic = hit_event_name(event.kind);
  out.distribution[1] = hits;
  out.distribution[0] = total - hits;
  const unsigned long long g = std::gcd(hits, total);
  out.expectation_num = static_cast<long long>(g == 0 ? hits : hits / g);
  out.expectation_den = g == 0 ? total : total / g;
  return out;
}

}  // namespace walklab
