#pragma once

// Test-only oracle: dense Gaussian elimination for the same box problems the
// iterative solver handles.  Independent implementation path (full matrix,
// partial pivoting), practical for (2L+1)^d up to a few thousand unknowns.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "walklab/lattice.hpp"

namespace walklab::testing {

class DenseBoxSolver {
 public:
  DenseBoxSolver(int d, int L) : d_(d), L_(L), m_(2 * L + 1) {
    std::size_t n = 1;
    for (int i = 0; i < d; ++i) n *= static_cast<std::size_t>(m_);
    if (n > 5000) throw std::invalid_argument("dense oracle: box too large");
    n_ = n;
    pinned_.assign(n, 0);
    pin_value_.assign(n, 0.0);
    rhs_.assign(n, 0.0);
  }

  std::size_t index_of(const LatticePoint& x) const {
    std::size_t idx = 0;
    for (int i = d_ - 1; i >= 0; --i)
      idx = idx * static_cast<std::size_t>(m_) + static_cast<std::size_t>(x[i] + L_);
    return idx;
  }

  void pin(const LatticePoint& x, double value) {
    pinned_[index_of(x)] = 1;
    pin_value_[index_of(x)] = value;
  }
  void set_outer_value(double g) { outer_ = g; }
  void add_source(const LatticePoint& x, double mass) { rhs_[index_of(x)] += mass; }

  std::vector<double> solve() const {
    const std::size_t n = n_;
    std::vector<double> A(n * n, 0.0);
    std::vector<double> b(n, 0.0);
    const double inv = 1.0 / (2.0 * d_);

    std::vector<Coord> coord(static_cast<std::size_t>(d_), -L_);
    for (std::size_t row = 0; row < n; ++row) {
      if (pinned_[row]) {
        A[row * n + row] = 1.0;
        b[row] = pin_value_[row];
      } else {
        A[row * n + row] = 1.0;
        b[row] = rhs_[row];
        LatticePoint x{};
        for (int i = 0; i < d_; ++i) x[i] = coord[static_cast<std::size_t>(i)];
        for (int dir = 0; dir < 2 * d_; ++dir) {
          const LatticePoint y = neighbor(x, dir);
          bool outside = false;
          for (int i = 0; i < d_; ++i) outside = outside || y[i] < -L_ || y[i] > L_;
          if (outside)
            b[row] += inv * outer_;
          else
            A[row * n + index_of(y)] -= inv;
        }
      }
      for (int i = 0; i < d_; ++i) {
        Coord& c = coord[static_cast<std::size_t>(i)];
        if (++c <= L_) break;
        c = -L_;
      }
    }

    // Gaussian elimination with partial pivoting
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t piv = col;
      double best = std::abs(A[perm[col] * n + col]);
      for (std::size_t r = col + 1; r < n; ++r) {
        const double v = std::abs(A[perm[r] * n + col]);
        if (v > best) {
          best = v;
          piv = r;
        }
      }
      if (best == 0.0) throw std::runtime_error("dense oracle: singular system");
      std::swap(perm[col], perm[piv]);
      const std::size_t prow = perm[col];
      for (std::size_t r = col + 1; r < n; ++r) {
        const std::size_t row = perm[r];
        const double f = A[row * n + col] / A[prow * n + col];
        if (f == 0.0) continue;
        for (std::size_t c = col; c < n; ++c) A[row * n + c] -= f * A[prow * n + c];
        b[row] -= f * b[prow];
      }
    }
    std::vector<double> u(n, 0.0);
    for (std::size_t ri = n; ri-- > 0;) {
      const std::size_t row = perm[ri];
      double acc = b[row];
      for (std::size_t c = ri + 1; c < n; ++c) acc -= A[row * n + c] * u[c];
      u[ri] = acc / A[row * n + ri];
    }
    // u is ordered by elimination column == original index order
    return u;
  }

  double value_at(const std::vector<double>& u, const LatticePoint& x) const {
    return u[index_of(x)];
  }

 private:
  int d_, L_, m_;
  std::size_t n_ = 0;
  double outer_ = 0.0;
  std::vector<std::uint8_t> pinned_;
  std::vector<double> pin_value_;
  std::vector<double> rhs_;
};

}  // namespace walklab::testing
