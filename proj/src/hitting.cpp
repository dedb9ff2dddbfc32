#include "walklab/hitting.hpp"

#include <algorithm>
#include <cmath>

#include "walklab/solver.hpp"
#include "walklab/stats_util.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace walklab {

const char* hit_target_name(HitTarget t) {
  switch (t) {
    case HitTarget::ReturnBeforeNeighbor: return "return-before-neighbor";
    case HitTarget::TruncatedReturn: return "truncated-return";
    case HitTarget::ReturnTail: return "return-tail";
    case HitTarget::NeighborTail: return "neighbor-tail";
    case HitTarget::JointTail: return "joint-tail";
  }
  return "?";
}

// --- jump tables -------------------------------------------------------------

std::vector<int> JumpTables::default_radii(int d, std::uint64_t cutoff_radius) {
  std::vector<int> radii;
  switch (d) {
    case 2: radii = {8, 32, 128, 512}; break;
    case 3: radii = {4, 16, 64}; break;
    case 4: radii = {4, 12}; break;
    default: radii = {3, 6}; break;
  }
  if (cutoff_radius > 0) {
    // a table at least as wide as the cap can never be used: jumps happen
    // strictly inside the cap
    std::vector<int> trimmed;
    for (int rho : radii)
      if (static_cast<std::uint64_t>(rho) < cutoff_radius) trimmed.push_back(rho);
    return trimmed;
  }
  return radii;
}

JumpTables JumpTables::build(int d, const std::vector<int>& radii, double solver_tol,
                             int threads) {
  check_dimension(d);
  JumpTables out;
  out.d_ = d;
  for (int rho : radii) {
    if (rho < 2) throw std::invalid_argument("JumpTables: radius must be >= 2");
    if (!out.tables_.empty() && rho <= out.tables_.back().radius)
      throw std::invalid_argument("JumpTables: radii must increase");

    // expected visits from the box center, absorbing beyond |x|_inf = rho - 1
    BoxSolver solver(d, rho - 1);
    solver.add_source(origin(), 1.0);
    solver.set_outer_value(0.0);
    solver.solve(solver_tol, 0, threads);

    Table table;
    table.radius = rho;
    // enumerate the shell |x|_inf = rho and its entry flux
    std::vector<double> mass;
    LatticePoint w{};
    std::vector<Coord> coord(static_cast<std::size_t>(d), -rho);
    for (;;) {
      Coord m = 0;
      for (int i = 0; i < d; ++i) {
        const Coord v = coord[static_cast<std::size_t>(i)] < 0 ? -coord[static_cast<std::size_t>(i)]
                                                               : coord[static_cast<std::size_t>(i)];
        if (v > m) m = v;
      }
      if (m == rho) {
        for (int i = 0; i < d; ++i) w[i] = coord[static_cast<std::size_t>(i)];
        double flux = 0.0;
        for (int dir = 0; dir < 2 * d; ++dir) {
          const LatticePoint y = neighbor(w, dir);
          if (linf_norm(y, d) <= rho - 1) flux += solver.value_at(y);
        }
        if (flux > 0.0) {
          table.shell.push_back(w);
          mass.push_back(flux / (2.0 * d));
        }
      }
      int axis = 0;
      for (; axis < d; ++axis) {
        if (++coord[static_cast<std::size_t>(axis)] <= rho) break;
        coord[static_cast<std::size_t>(axis)] = -rho;
      }
      if (axis == d) break;
    }

    double total = 0.0;
    for (double v : mass) total += v;
    if (std::abs(total - 1.0) > 1e-6)
      throw std::runtime_error("JumpTables: exit law mass " + std::to_string(total));
    for (double& v : mass) v /= total;

    // Walker alias table
    const std::size_t K = mass.size();
    table.alias.assign(K, 0);
    table.threshold.assign(K, 0);
    std::vector<double> scaled(K);
    for (std::size_t i = 0; i < K; ++i) scaled[i] = mass[i] * static_cast<double>(K);
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < K; ++i)
      (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    while (!small.empty() && !large.empty()) {
      const std::uint32_t s = small.back();
      small.pop_back();
      const std::uint32_t l = large.back();
      table.threshold[s] =
          static_cast<std::uint64_t>(std::min(1.0, scaled[s]) * 18446744073709551615.0);
      table.alias[s] = l;
      scaled[l] -= 1.0 - scaled[s];
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (std::uint32_t i : large) {
      table.threshold[i] = ~std::uint64_t{0};
      table.alias[i] = i;
    }
    for (std::uint32_t i : small) {
      table.threshold[i] = ~std::uint64_t{0};
      table.alias[i] = i;
    }
    out.tables_.push_back(std::move(table));
  }
  return out;
}

int JumpTables::usable_radius(Coord max_allowed) const {
  int best = 0;
  for (const Table& t : tables_)
    if (t.radius <= max_allowed) best = t.radius;
  return best;
}

LatticePoint JumpTables::sample(int radius, RngStream& rng) const {
  for (const Table& t : tables_) {
    if (t.radius != radius) continue;
    const std::uint64_t slot = rng.next_below(t.shell.size());
    const std::uint64_t frac = rng.next_u64();
    const std::size_t i = static_cast<std::size_t>(slot);
    return frac < t.threshold[i] ? t.shell[i] : t.shell[t.alias[i]];
  }
  throw std::invalid_argument("JumpTables: no table for requested radius");
}

// --- single race trial -------------------------------------------------------

RaceOutcome race_trial(int d, int b_dir, const CutoffPolicy& cutoff, RngStream& rng,
                       const JumpTables* jumps) {
  DirectionSampler dirs(d, rng);
  const LatticePoint b = neighbor(origin(), b_dir);
  LatticePoint pos = neighbor(origin(), dirs.next());  // T >= 1: the first step
  std::uint64_t steps = 1;
  const bool radius_capped = cutoff.kind == CutoffPolicy::Kind::RadiusCap;
  for (;;) {
    if (pos == origin()) return RaceOutcome::ZeroFirst;
    if (pos == b) return RaceOutcome::BFirst;
    if (radius_capped) {
      if (linf_norm(pos, d) >= static_cast<Coord>(cutoff.value)) return RaceOutcome::Undecided;
    } else if (steps >= cutoff.value) {
      return RaceOutcome::Undecided;
    }
    if (jumps != nullptr && radius_capped) {
      Coord dist = linf_norm(pos, d);
      LatticePoint rel = pos;
      rel[direction_axis(b_dir)] -= direction_sign(b_dir);
      const Coord dist_b = linf_norm(rel, d);
      if (dist_b < dist) dist = dist_b;
      const int rho = jumps->usable_radius(dist);
      if (rho > 0) {
        const LatticePoint off = jumps->sample(rho, rng);
        for (int i = 0; i < d; ++i) pos[i] += off[i];
        continue;
      }
    }
    pos = neighbor(pos, dirs.next());
    ++steps;
  }
}

// --- farms -------------------------------------------------------------------

namespace {

HittingEstimate finish_race_estimate(HittingEstimate est) {
  const double T = static_cast<double>(est.trials);
  est.p_pessimistic = static_cast<double>(est.n_success) / T;
  est.p_optimistic = static_cast<double>(est.n_success + est.n_undecided) / T;
  est.probability = 0.5 * (est.p_pessimistic + est.p_optimistic);
  // variance of the {0, 1/2, 1} score plus half the bracket width as bias allowance
  const double ex2 = (static_cast<double>(est.n_success) +
                      0.25 * static_cast<double>(est.n_undecided)) /
                     T;
  const double var = std::max(0.0, ex2 - est.probability * est.probability);
  est.half_width = kZ95 * std::sqrt(var / T) + 0.5 * (est.p_optimistic - est.p_pessimistic);
  return est;
}

HittingEstimate finish_exact_estimate(HittingEstimate est) {
  est.p_pessimistic = est.p_optimistic = est.probability =
      static_cast<double>(est.n_success) / static_cast<double>(est.trials);
  est.half_width = binomial_half_width(est.n_success, est.trials);
  return est;
}

}  // namespace

HittingEstimate estimate_return_before_neighbor(int d, int b_dir, CutoffPolicy cutoff,
                                                std::uint64_t trials, std::uint64_t master_seed,
                                                const JumpTables* jumps, int threads) {
  check_dimension(d);
  if (trials < 1) throw std::invalid_argument("estimate: trials must be >= 1");
  if (b_dir < 0 || b_dir >= 2 * d) throw std::invalid_argument("estimate: bad direction index");
  if (cutoff.kind == CutoffPolicy::Kind::None || cutoff.value == 0)
    throw std::invalid_argument(
        "estimate_return_before_neighbor: a cutoff policy is required (the race has "
        "infinite expected decision time in d=2 and positive escape mass in d>=3)");
  if (jumps != nullptr && jumps->dimension() != d)
    throw std::invalid_argument("estimate: jump tables built for a different dimension");

  std::uint64_t zero = 0, bwin = 0, undecided = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(+ : zero, bwin, undecided) \
    num_threads(threads > 0 ? threads : 1)
#endif
  for (long long t = 0; t < static_cast<long long>(trials); ++t) {
    RngStream rng(master_seed, static_cast<std::uint64_t>(t));
    switch (race_trial(d, b_dir, cutoff, rng, jumps)) {
      case RaceOutcome::ZeroFirst: ++zero; break;
      case RaceOutcome::BFirst: ++bwin; break;
      case RaceOutcome::Undecided: ++undecided; break;
    }
  }
  HittingEstimate est;
  est.target = HitTarget::ReturnBeforeNeighbor;
  est.d = d;
  est.b_dir = b_dir;
  est.cutoff = cutoff;
  est.trials = trials;
  est.n_success = zero;
  est.n_failure = bwin;
  est.n_undecided = undecided;
  return finish_race_estimate(est);
}

HittingEstimate estimate_truncated(int d, int b_dir, std::uint64_t k, std::uint64_t trials,
                                   std::uint64_t master_seed, int threads) {
  check_dimension(d);
  if (k < 1) throw std::invalid_argument("estimate_truncated: k must be >= 1");
  if (trials < 1) throw std::invalid_argument("estimate: trials must be >= 1");
  const LatticePoint b = neighbor(origin(), b_dir);

  std::uint64_t wins = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(+ : wins) \
    num_threads(threads > 0 ? threads : 1)
#endif
  for (long long t = 0; t < static_cast<long long>(trials); ++t) {
    RngStream rng(master_seed, static_cast<std::uint64_t>(t));
    DirectionSampler dirs(d, rng);
    LatticePoint pos = origin();
    // {T_0 < T_b ^ k} is decided by step k-1
    for (std::uint64_t j = 1; j <= k - 1; ++j) {
      pos = neighbor(pos, dirs.next());
      if (pos == origin()) {
        ++wins;
        break;
      }
      if (pos == b) break;
    }
  }
  HittingEstimate est;
  est.target = HitTarget::TruncatedReturn;
  est.d = d;
  est.b_dir = b_dir;
  est.cutoff = CutoffPolicy::step_cap(k);
  est.trials = trials;
  est.n_success = wins;
  est.n_failure = trials - wins;
  return finish_exact_estimate(est);
}

namespace {

// First time in [1, cap] at which the target's stopping set is visited;
// cap + 1 when it is not visited by cap.  The hot loop tracks how many axes
// disagree with each target instead of comparing whole points, so a step
// costs O(1) in every dimension.
std::uint64_t decision_time(int d, HitTarget target, std::uint64_t cap, int b_dir,
                            RngStream& rng) {
  DirectionSampler dirs(d, rng);
  const LatticePoint b = neighbor(origin(), b_dir);
  const bool watch_zero = target == HitTarget::ReturnTail || target == HitTarget::JointTail;
  const bool watch_b = target == HitTarget::NeighborTail || target == HitTarget::JointTail;
  Coord pos[kMaxDim] = {0, 0, 0, 0, 0};
  int off_zero = 0;  // axes where pos differs from the origin
  int off_b = 1;     // axes where pos differs from b
  for (std::uint64_t j = 1; j <= cap; ++j) {
    const int dir = dirs.next();
    const int axis = direction_axis(dir);
    Coord& c = pos[axis];
    const Coord target_b = b[axis];
    if (c == 0) ++off_zero;
    if (c == target_b) ++off_b;
    c += direction_sign(dir);
    if (c == 0) --off_zero;
    if (c == target_b) --off_b;
    if (watch_zero && off_zero == 0) return j;
    if (watch_b && off_b == 0) return j;
  }
  return cap + 1;
}

}  // namespace

HittingEstimate estimate_tail(int d, HitTarget target, std::uint64_t m, std::uint64_t trials,
                              std::uint64_t master_seed, int b_dir, int threads) {
  const std::vector<HittingEstimate> grid =
      estimate_tail_grid(d, target, {m}, trials, master_seed, b_dir, threads);
  return grid.front();
}

std::vector<HittingEstimate> estimate_tail_grid(int d, HitTarget target,
                                                const std::vector<std::uint64_t>& ms,
                                                std::uint64_t trials, std::uint64_t master_seed,
                                                int b_dir, int threads) {
  check_dimension(d);
  if (target != HitTarget::ReturnTail && target != HitTarget::NeighborTail &&
      target != HitTarget::JointTail)
    throw std::invalid_argument("estimate_tail: target must be a tail event");
  if (ms.empty() || trials < 1) throw std::invalid_argument("estimate_tail: empty grid or trials");
  for (std::uint64_t m : ms)
    if (m < 1) throw std::invalid_argument("estimate_tail: m must be >= 1");
  std::vector<std::uint64_t> sorted = ms;
  std::sort(sorted.begin(), sorted.end());
  const std::uint64_t cap = sorted.back();

  std::vector<std::uint64_t> over(sorted.size(), 0);
#ifdef _OPENMP
#pragma omp parallel num_threads(threads > 0 ? threads : 1)
#endif
  {
    std::vector<std::uint64_t> local(sorted.size(), 0);
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
    for (long long t = 0; t < static_cast<long long>(trials); ++t) {
      RngStream rng(master_seed, static_cast<std::uint64_t>(t));
      const std::uint64_t T = decision_time(d, target, cap, b_dir, rng);
      for (std::size_t i = 0; i < sorted.size(); ++i)
        if (T > sorted[i]) ++local[i];
    }
#ifdef _OPENMP
#pragma omp critical
#endif
    for (std::size_t i = 0; i < sorted.size(); ++i) over[i] += local[i];
  }

  std::vector<HittingEstimate> out;
  out.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    HittingEstimate est;
    est.target = target;
    est.d = d;
    est.b_dir = b_dir;
    est.cutoff = CutoffPolicy::step_cap(sorted[i]);
    est.trials = trials;
    est.n_success = over[i];
    est.n_failure = trials - over[i];
    out.push_back(finish_exact_estimate(est));
  }
  return out;
}

}  // namespace walklab
