#pragma once

// Monte Carlo estimators for the hitting-time quantities entering the limit
// laws: the race P(T_0 < T_b), its step-cap truncations P(T_0 < T_b ^ k),
// and tail probabilities P(T > m) for T in {T_0, T_b, T_0 ^ T_b}.
//
// Tail and truncated events are decided after finitely many steps and carry
// no cutoff bias.  The untruncated race is stopped by a cutoff policy; a run
// that hits the cutoff is scored both pessimistically (as a loss) and
// optimistically (as a win), which brackets the true probability.  The
// reported point estimate is the midpoint of the two scores, and the half
// width adds half the bracket width to the binomial confidence term.
//
// Radius-capped races are accelerated with exact long jumps: away from
// {0, b} the walk's next relevant event is its first exit from a box around
// its current position, and the exit law of a centered box is precomputed
// once per radius from an expected-visits solve.  Jumps subsample the same
// walk, so decided outcomes keep their exact law; only the cutoff detection
// time changes, which the two-sided scoring already accounts for.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "walklab/lattice.hpp"
#include "walklab/rng.hpp"

namespace walklab {

struct CutoffPolicy {
  enum class Kind { None, StepCap, RadiusCap };
  Kind kind = Kind::None;
  std::uint64_t value = 0;

  static CutoffPolicy none() { return {Kind::None, 0}; }
  static CutoffPolicy step_cap(std::uint64_t k) { return {Kind::StepCap, k}; }
  static CutoffPolicy radius_cap(std::uint64_t r) { return {Kind::RadiusCap, r}; }

  std::string describe() const {
    switch (kind) {
      case Kind::StepCap: return "step-cap:" + std::to_string(value);
      case Kind::RadiusCap: return "radius-cap:" + std::to_string(value);
      default: return "none";
    }
  }
};

enum class HitTarget {
  ReturnBeforeNeighbor,  // {T_0 < T_b}
  TruncatedReturn,       // {T_0 < T_b ^ k}
  ReturnTail,            // {T_0 > m}
  NeighborTail,          // {T_b > m}
  JointTail,             // {T_0 ^ T_b > m}
};

const char* hit_target_name(HitTarget t);

struct HittingEstimate {
  HitTarget target = HitTarget::ReturnBeforeNeighbor;
  int d = 2;
  int b_dir = 0;
  CutoffPolicy cutoff;
  std::uint64_t trials = 0;
  std::uint64_t n_success = 0;
  std::uint64_t n_failure = 0;
  std::uint64_t n_undecided = 0;
  double probability = 0.0;    // midpoint score when a cutoff leaves undecided mass
  double half_width = 0.0;     // binomial CI plus half the undecided mass
  double p_pessimistic = 0.0;  // undecided scored as failure
  double p_optimistic = 0.0;   // undecided scored as success
};

// Exit laws of centered boxes, one alias table per radius, shared by all
// trials.  Tables are deterministic (fixed-order construction on top of the
// red-black solver), so estimates stay reproducible across thread counts.
class JumpTables {
 public:
  JumpTables() = default;

  // radii must be increasing; each radius rho adds a table of the first-exit
  // law onto the shell |x|_inf = rho for a walk started at the box center
  static JumpTables build(int d, const std::vector<int>& radii, double solver_tol = 1e-13,
                          int threads = 1);

  bool empty() const { return tables_.empty(); }
  int dimension() const { return d_; }

  // largest table radius <= max_allowed, or 0 when none fits
  int usable_radius(Coord max_allowed) const;

  // sample a shell offset for the given table radius
  LatticePoint sample(int radius, RngStream& rng) const;

  // standard radius schedule; radii at or beyond a known cutoff radius are
  // dropped since jumps only happen strictly inside the cap
  static std::vector<int> default_radii(int d, std::uint64_t cutoff_radius = 0);

 private:
  struct Table {
    int radius = 0;
    std::vector<LatticePoint> shell;
    std::vector<std::uint32_t> alias;
    std::vector<std::uint64_t> threshold;  // accept slot i when r < threshold[i]
  };
  int d_ = 0;
  std::vector<Table> tables_;
};

// P(T_0 < T_b): walk from the origin until it revisits 0 (success), visits b
// (failure), or trips the cutoff (undecided).  Requires a cutoff: the race
// has infinite expected decision time in d = 2 and positive no-decision mass
// in d >= 3.
HittingEstimate estimate_return_before_neighbor(int d, int b_dir, CutoffPolicy cutoff,
                                                std::uint64_t trials, std::uint64_t master_seed,
                                                const JumpTables* jumps = nullptr,
                                                int threads = 1);

// P(T_0 < T_b ^ k): decided by step k-1, no cutoff bias.
HittingEstimate estimate_truncated(int d, int b_dir, std::uint64_t k, std::uint64_t trials,
                                   std::uint64_t master_seed, int threads = 1);

// P(T > m) for T in {T_0, T_b, T_0 ^ T_b}: decided by step m.
HittingEstimate estimate_tail(int d, HitTarget target, std::uint64_t m, std::uint64_t trials,
                              std::uint64_t master_seed, int b_dir = 0, int threads = 1);

// One pass that returns P(T > a) for every a in a grid (single walk per
// trial, indicators read off at the grid points).
std::vector<HittingEstimate> estimate_tail_grid(int d, HitTarget target,
                                                const std::vector<std::uint64_t>& ms,
                                                std::uint64_t trials, std::uint64_t master_seed,
                                                int b_dir = 0, int threads = 1);

// Outcome of a single race trial; exposed for tests.
enum class RaceOutcome { ZeroFirst, BFirst, Undecided };
RaceOutcome race_trial(int d, int b_dir, const CutoffPolicy& cutoff, RngStream& rng,
                       const JumpTables* jumps);

}  // namespace walklab
