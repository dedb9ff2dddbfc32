#pragma once

// Discrete harmonic solver on the box |x|_inf <= L in Z^d.
//
// Solves u(x) = rhs(x) + (1/2d) * sum of neighbor values, where neighbors
// beyond the box contribute a constant Dirichlet value and selected interior
// sites can be pinned to fixed values.  Covers both problem families used
// here: hitting-probability boundary-value problems (pinned sites 0 and b,
// rhs = 0) and expected-visit problems (point source, absorbing frame).
//
// The sweep is red-black SOR.  Every update of one color reads only sites of
// the other color, so the iterates are bitwise identical for any thread
// count; the residual is an infinity norm, whose reduction is
// order-independent.  Convergence of the parallel kernel is checked in tests
// against a single-threaded natural-order Gauss-Seidel reference and, at
// small L, against a dense direct solve.

#include <cstdint>
#include <vector>

#include "walklab/lattice.hpp"

namespace walklab {

class BoxSolver {
 public:
  // memory_budget_sites guards (2L+1)^d blowups in higher dimensions
  BoxSolver(int d, int L, std::uint64_t memory_budget_sites = std::uint64_t{1} << 25);

  int dimension() const { return d_; }
  int radius() const { return L_; }
  std::size_t size() const { return u_.size(); }

  void pin(const LatticePoint& x, double value);
  void set_outer_value(double g);
  void add_source(const LatticePoint& x, double mass);

  // Runs SOR sweeps until the infinity-norm residual drops to tol; throws
  // on non-convergence within the sweep budget.  threads <= 1 runs the
  // serial kernel; larger values run the OpenMP kernel (identical iterates).
  // Returns the final residual.
  double solve(double tol = 1e-12, int max_sweeps = 0, int threads = 1);

  // Plain natural-order Gauss-Seidel (omega = 1): the slow reference kernel.
  double solve_reference(double tol = 1e-12, long max_sweeps = 0);

  double value_at(const LatticePoint& x) const;
  double residual() const { return residual_; }
  int sweeps_used() const { return sweeps_used_; }

  // max-norm bound on ||(I - P)^{-1}||: expected absorption time of the box
  double error_amplification() const;

 private:
  std::size_t index_of(const LatticePoint& x) const;
  void sweep_color_2d(int color, double omega);
  void sweep_color_3d(int color, double omega);
  void sweep_color_generic(int color, double omega);
  void sweep_color(int color, double omega, int threads);
  double max_residual() const;

  int d_;
  int L_;
  int m_;  // 2L+1 sites per axis
  double outer_ = 0.0;
  std::vector<double> u_;
  std::vector<double> rhs_;
  std::vector<std::uint8_t> pinned_;
  bool has_source_ = false;
  double residual_ = 0.0;
  int sweeps_used_ = 0;
};

}  // namespace walklab
