#pragma once

// Certified two-sided evaluation of P(T_0 < T_b) on finite boxes.
//
// Three absorbing problems on [-L,L]^d, each solved to a fixed residual:
//
//   p_zero_first:  P(return to 0 strictly before visiting b or leaving the box)
//   p_b_first:     P(visit b strictly before returning to 0 or leaving the box)
//   p_undecided:   probability the walk leaves the box first
//
// Reassigning the escaped mass to "b wins" gives the lower bound p_zero_first;
// reassigning it to "0 wins" gives the upper bound p_zero_first + p_undecided.
// That pair is the reported bracket in d = 2.
//
// In transient dimensions the escaped mass mostly never returns, so the
// naive upper bound converges to P(T_0<T_b) + P(T_0 and T_b infinite), not to
// P(T_0<T_b).  There the bracket is tightened with two facts that hold for
// any neighbor b of the origin:
//   (1) P(T_0 < T_b) = P(T_b < T_0), by one-step averaging of the two-point
//       Green function (G(0,b) = G(0,0) - 1 for a neighbor), so p_b_first is
//       also a valid lower bound; and
//   (2) P(T_0 < T_b) <= 1/2, since the two equal probabilities sum to at
//       most 1.
// Endpoints are padded by the solver residual times the box absorption-time
// bound, so the interval is honest with respect to the linear algebra too.

#include <cstdint>

#include "walklab/lattice.hpp"

namespace walklab {

struct ExactBracket {
  double lower = 0.0;
  double upper = 1.0;
  int box_radius = 0;
  double residual = 0.0;       // worst infinity-norm solver residual
  double p_zero_first = 0.0;   // decided-inside-the-box masses
  double p_b_first = 0.0;
  double p_undecided = 0.0;

  double midpoint() const { return 0.5 * (lower + upper); }
  double width() const { return upper - lower; }
};

ExactBracket exact_bracket_2d(int b_dir, int box_radius, double solver_tolerance = 1e-12,
                              int threads = 1);

ExactBracket exact_bracket_highd(int d, int b_dir, int box_radius,
                                 double solver_tolerance = 1e-12, int threads = 1,
                                 std::uint64_t memory_budget_sites = std::uint64_t{1} << 25);

// largest box radius per dimension that keeps (2L+1)^d at desk scale
inline int default_bracket_radius(int d) {
  switch (d) {
    case 2: return 320;
    case 3: return 40;
    case 4: return 12;
    default: return 6;
  }
}

}  // namespace walklab
