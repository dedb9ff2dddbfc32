#include "walklab/bracket.hpp"

#include <algorithm>
#include <stdexcept>

#include "walklab/solver.hpp"

namespace walklab {

namespace {

// One-step average over the origin's neighbors of an absorbing-problem
// solution: captures the first step of the walk started at 0.
double one_step_average(const BoxSolver& solver, int d, int b_dir, double value_at_b) {
  double acc = 0.0;
  for (int dir = 0; dir < 2 * d; ++dir) {
    const LatticePoint z = neighbor(origin(), dir);
    acc += (dir == b_dir) ? value_at_b : solver.value_at(z);
  }
  return acc / (2.0 * d);
}

struct DecidedMasses {
  double p_zero_first;
  double p_b_first;
  double residual;
  double pad;
};

DecidedMasses solve_masses(int d, int b_dir, int L, double tol, int threads,
                           std::uint64_t budget) {
  if (b_dir < 0 || b_dir >= 2 * d) throw std::invalid_argument("bracket: bad direction index");
  if (L < 2) throw std::invalid_argument("bracket: box radius must be >= 2");
  const LatticePoint b = neighbor(origin(), b_dir);

  // hit 0 strictly before b, before leaving the box
  BoxSolver zero_first(d, L, budget);
  zero_first.pin(origin(), 1.0);
  zero_first.pin(b, 0.0);
  zero_first.set_outer_value(0.0);
  const double r1 = zero_first.solve(tol, 0, threads);

  // hit b strictly before returning to 0, before leaving the box
  BoxSolver b_first(d, L, budget);
  b_first.pin(origin(), 0.0);
  b_first.pin(b, 1.0);
  b_first.set_outer_value(0.0);
  const double r2 = b_first.solve(tol, 0, threads);

  DecidedMasses m{};
  // stepping straight onto b decides the race at time 1
  m.p_zero_first = one_step_average(zero_first, d, b_dir, 0.0);
  m.p_b_first = one_step_average(b_first, d, b_dir, 1.0);
  m.residual = std::max(r1, r2);
  m.pad = m.residual * zero_first.error_amplification();
  return m;
}

}  // namespace

ExactBracket exact_bracket_2d(int b_dir, int box_radius, double solver_tolerance, int threads) {
  const DecidedMasses m =
      solve_masses(2, b_dir, box_radius, solver_tolerance, threads, std::uint64_t{1} << 25);
  ExactBracket out;
  out.box_radius = box_radius;
  out.residual = m.residual;
  out.p_zero_first = m.p_zero_first;
  out.p_b_first = m.p_b_first;
  out.p_undecided = std::max(0.0, 1.0 - m.p_zero_first - m.p_b_first);
  out.lower = std::max(0.0, m.p_zero_first - m.pad);
  out.upper = std::min(1.0, m.p_zero_first + out.p_undecided + 2.0 * m.pad);
  return out;
}

ExactBracket exact_bracket_highd(int d, int b_dir, int box_radius, double solver_tolerance,
                                 int threads, std::uint64_t memory_budget_sites) {
  if (d < 3 || d > kMaxDim)
    throw std::invalid_argument("exact_bracket_highd: dimension must be in {3,4,5}");
  const DecidedMasses m =
      solve_masses(d, b_dir, box_radius, solver_tolerance, threads, memory_budget_sites);
  ExactBracket out;
  out.box_radius = box_radius;
  out.residual = m.residual;
  out.p_zero_first = m.p_zero_first;
  out.p_b_first = m.p_b_first;
  out.p_undecided = std::max(0.0, 1.0 - m.p_zero_first - m.p_b_first);
  out.lower = std::max(0.0, std::max(m.p_zero_first, m.p_b_first) - m.pad);
  const double naive_upper = m.p_zero_first + out.p_undecided;
  out.upper = std::min(std::min(1.0, naive_upper + 2.0 * m.pad), 0.5 + m.pad);
  if (out.upper < out.lower) out.upper = out.lower;
  return out;
}

}  // namespace walklab
