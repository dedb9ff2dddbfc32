#include "walklab/solver.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace walklab {

BoxSolver::BoxSolver(int d, int L, std::uint64_t memory_budget_sites) : d_(d), L_(L), m_(2 * L + 1) {
  check_dimension(d);
  if (L < 1) throw std::invalid_argument("BoxSolver: box radius must be >= 1");
  std::uint64_t n = 1;
  for (int i = 0; i < d; ++i) {
    n *= static_cast<std::uint64_t>(m_);
    if (n > memory_budget_sites)
      throw std::invalid_argument("BoxSolver: (2L+1)^d exceeds the memory budget");
  }
  u_.assign(n, 0.0);
  rhs_.assign(n, 0.0);
  pinned_.assign(n, 0);
}

std::size_t BoxSolver::index_of(const LatticePoint& x) const {
  std::size_t idx = 0;
  for (int i = d_ - 1; i >= 0; --i) {
    const Coord c = x[i];
    if (c < -L_ || c > L_) throw std::out_of_range("BoxSolver: point outside the box");
    idx = idx * static_cast<std::size_t>(m_) + static_cast<std::size_t>(c + L_);
  }
  return idx;
}

void BoxSolver::pin(const LatticePoint& x, double value) {
  const std::size_t i = index_of(x);
  pinned_[i] = 1;
  u_[i] = value;
}

void BoxSolver::set_outer_value(double g) { outer_ = g; }

void BoxSolver::add_source(const LatticePoint& x, double mass) {
  rhs_[index_of(x)] += mass;
  has_source_ = true;
}

double BoxSolver::error_amplification() const {
  return static_cast<double>(d_) * static_cast<double>(L_ + 1) * static_cast<double>(L_ + 1);
}

// --- sweeps -----------------------------------------------------------------

void BoxSolver::sweep_color_2d(int color, double omega) {
  const int m = m_;
  const double inv = 0.25;
  const double g = outer_;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int j = 0; j < m; ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * static_cast<std::size_t>(m);
    const int start = ((j + color) & 1) ? 1 : 0;
    for (int i = start; i < m; i += 2) {
      const std::size_t idx = row + static_cast<std::size_t>(i);
      if (pinned_[idx]) continue;
      const double w = (i > 0) ? u_[idx - 1] : g;
      const double e = (i + 1 < m) ? u_[idx + 1] : g;
      const double s = (j > 0) ? u_[idx - static_cast<std::size_t>(m)] : g;
      const double n = (j + 1 < m) ? u_[idx + static_cast<std::size_t>(m)] : g;
      const double target = rhs_[idx] + inv * (w + e + s + n);
      u_[idx] += omega * (target - u_[idx]);
    }
  }
}

void BoxSolver::sweep_color_3d(int color, double omega) {
  const int m = m_;
  const std::size_t sm = static_cast<std::size_t>(m);
  const double inv = 1.0 / 6.0;
  const double g = outer_;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int k = 0; k < m; ++k) {
    for (int j = 0; j < m; ++j) {
      const std::size_t base = (static_cast<std::size_t>(k) * sm + static_cast<std::size_t>(j)) * sm;
      const int start = ((j + k + color) & 1) ? 1 : 0;
      for (int i = start; i < m; i += 2) {
        const std::size_t idx = base + static_cast<std::size_t>(i);
        if (pinned_[idx]) continue;
        const double w = (i > 0) ? u_[idx - 1] : g;
        const double e = (i + 1 < m) ? u_[idx + 1] : g;
        const double s = (j > 0) ? u_[idx - sm] : g;
        const double n = (j + 1 < m) ? u_[idx + sm] : g;
        const double dn = (k > 0) ? u_[idx - sm * sm] : g;
        const double up = (k + 1 < m) ? u_[idx + sm * sm] : g;
        const double target = rhs_[idx] + inv * (w + e + s + n + dn + up);
        u_[idx] += omega * (target - u_[idx]);
      }
    }
  }
}

void BoxSolver::sweep_color_generic(int color, double omega) {
  const double inv = 1.0 / (2.0 * d_);
  std::vector<int> coord(static_cast<std::size_t>(d_), 0);  // offsets in [0, m)
  std::vector<std::size_t> stride(static_cast<std::size_t>(d_), 1);
  for (int i = 1; i < d_; ++i)
    stride[static_cast<std::size_t>(i)] = stride[static_cast<std::size_t>(i - 1)] * static_cast<std::size_t>(m_);
  const std::size_t n = u_.size();
  int parity = 0;
  for (std::size_t idx = 0; idx < n; ++idx) {
    if (((parity + color) & 1) == 0 && !pinned_[idx]) {
      double acc = 0.0;
      for (int a = 0; a < d_; ++a) {
        const std::size_t st = stride[static_cast<std::size_t>(a)];
        const int c = coord[static_cast<std::size_t>(a)];
        acc += (c > 0) ? u_[idx - st] : outer_;
        acc += (c + 1 < m_) ? u_[idx + st] : outer_;
      }
      const double target = rhs_[idx] + inv * acc;
      u_[idx] += omega * (target - u_[idx]);
    }
    // odometer increment, tracking the coordinate-sum parity
    for (int a = 0; a < d_; ++a) {
      int& c = coord[static_cast<std::size_t>(a)];
      if (++c < m_) {
        parity ^= 1;
        break;
      }
      c = 0;
      if ((m_ & 1) == 0) parity ^= 1;  // dropping (m-1) flips parity only for odd m-1
    }
  }
}

void BoxSolver::sweep_color(int color, double omega, int threads) {
#ifdef _OPENMP
  omp_set_num_threads(threads > 0 ? threads : 1);
#else
  (void)threads;
#endif
  if (d_ == 2)
    sweep_color_2d(color, omega);
  else if (d_ == 3)
    sweep_color_3d(color, omega);
  else
    sweep_color_generic(color, omega);
}

double BoxSolver::max_residual() const {
  const double inv = 1.0 / (2.0 * d_);
  double worst = 0.0;
  if (d_ == 2) {
    const int m = m_;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(max : worst)
#endif
    for (int j = 0; j < m; ++j) {
      const std::size_t row = static_cast<std::size_t>(j) * static_cast<std::size_t>(m);
      for (int i = 0; i < m; ++i) {
        const std::size_t idx = row + static_cast<std::size_t>(i);
        if (pinned_[idx]) continue;
        const double w = (i > 0) ? u_[idx - 1] : outer_;
        const double e = (i + 1 < m) ? u_[idx + 1] : outer_;
        const double s = (j > 0) ? u_[idx - static_cast<std::size_t>(m)] : outer_;
        const double n = (j + 1 < m) ? u_[idx + static_cast<std::size_t>(m)] : outer_;
        const double r = rhs_[idx] + inv * (w + e + s + n) - u_[idx];
        const double a = r < 0 ? -r : r;
        if (a > worst) worst = a;
      }
    }
    return worst;
  }
  if (d_ == 3) {
    const int m = m_;
    const std::size_t sm = static_cast<std::size_t>(m);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(max : worst)
#endif
    for (int k = 0; k < m; ++k) {
      for (int j = 0; j < m; ++j) {
        const std::size_t base = (static_cast<std::size_t>(k) * sm + static_cast<std::size_t>(j)) * sm;
        for (int i = 0; i < m; ++i) {
          const std::size_t idx = base + static_cast<std::size_t>(i);
          if (pinned_[idx]) continue;
          const double w = (i > 0) ? u_[idx - 1] : outer_;
          const double e = (i + 1 < m) ? u_[idx + 1] : outer_;
          const double s = (j > 0) ? u_[idx - sm] : outer_;
          const double n = (j + 1 < m) ? u_[idx + sm] : outer_;
          const double dn = (k > 0) ? u_[idx - sm * sm] : outer_;
          const double up = (k + 1 < m) ? u_[idx + sm * sm] : outer_;
          const double r = rhs_[idx] + inv * (w + e + s + n + dn + up) - u_[idx];
          const double a = r < 0 ? -r : r;
          if (a > worst) worst = a;
        }
      }
    }
    return worst;
  }
  // generic odometer walk
  std::vector<int> coord(static_cast<std::size_t>(d_), 0);
  std::vector<std::size_t> stride(static_cast<std::size_t>(d_), 1);
  for (int i = 1; i < d_; ++i)
    stride[static_cast<std::size_t>(i)] = stride[static_cast<std::size_t>(i - 1)] * static_cast<std::size_t>(m_);
  for (std::size_t idx = 0; idx < u_.size(); ++idx) {
    if (!pinned_[idx]) {
      double acc = 0.0;
      for (int a = 0; a < d_; ++a) {
        const std::size_t st = stride[static_cast<std::size_t>(a)];
        const int c = coord[static_cast<std::size_t>(a)];
        acc += (c > 0) ? u_[idx - st] : outer_;
        acc += (c + 1 < m_) ? u_[idx + st] : outer_;
      }
      const double r = rhs_[idx] + inv * acc - u_[idx];
      const double v = r < 0 ? -r : r;
      if (v > worst) worst = v;
    }
    for (int a = 0; a < d_; ++a) {
      int& c = coord[static_cast<std::size_t>(a)];
      if (++c < m_) break;
      c = 0;
    }
  }
  return worst;
}

double BoxSolver::solve(double tol, int max_sweeps, int threads) {
  // asymptotically optimal over-relaxation for the cube
  const double rho = std::cos(M_PI / (m_ + 1));
  const double omega = 2.0 / (1.0 + std::sqrt(1.0 - rho * rho));
  if (max_sweeps <= 0) max_sweeps = 40 * m_ + 4000;
  for (int s = 1; s <= max_sweeps; ++s) {
    sweep_color(0, omega, threads);
    sweep_color(1, omega, threads);
    sweeps_used_ = s;
    if ((s & 15) == 0 || s == max_sweeps) {
      residual_ = max_residual();
      if (residual_ <= tol) return residual_;
    }
  }
  throw std::runtime_error("BoxSolver: no convergence to tol " + std::to_string(tol) + " within " +
                           std::to_string(max_sweeps) + " sweeps (residual " +
                           std::to_string(residual_) + ")");
}

double BoxSolver::solve_reference(double tol, long max_sweeps) {
  if (max_sweeps <= 0) max_sweeps = 400L * m_ * m_ + 100000L;
  const double inv = 1.0 / (2.0 * d_);
  std::vector<std::size_t> stride(static_cast<std::size_t>(d_), 1);
  for (int i = 1; i < d_; ++i)
    stride[static_cast<std::size_t>(i)] = stride[static_cast<std::size_t>(i - 1)] * static_cast<std::size_t>(m_);
  for (long s = 1; s <= max_sweeps; ++s) {
    std::vector<int> coord(static_cast<std::size_t>(d_), 0);
    for (std::size_t idx = 0; idx < u_.size(); ++idx) {
      if (!pinned_[idx]) {
        double acc = 0.0;
        for (int a = 0; a < d_; ++a) {
          const std::size_t st = stride[static_cast<std::size_t>(a)];
          const int c = coord[static_cast<std::size_t>(a)];
          acc += (c > 0) ? u_[idx - st] : outer_;
          acc += (c + 1 < m_) ? u_[idx + st] : outer_;
        }
        u_[idx] = rhs_[idx] + inv * acc;
      }
      for (int a = 0; a < d_; ++a) {
        int& c = coord[static_cast<std::size_t>(a)];
        if (++c < m_) break;
        c = 0;
      }
    }
    if ((s & 31) == 0 || s == max_sweeps) {
      residual_ = max_residual();
      sweeps_used_ = static_cast<int>(s);
      if (residual_ <= tol) return residual_;
    }
  }
  throw std::runtime_error("BoxSolver: reference kernel did not converge");
}

double BoxSolver::value_at(const LatticePoint& x) const { return u_[index_of(x)]; }

}  // namespace walklab
