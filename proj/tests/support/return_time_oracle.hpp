#pragma once

// Exact return-time tails for the 2-d walk, via the first-return renewal
// recursion: with p_k = P(S_{2k} = 0) = (binom(2k,k) 2^{-2k})^2 and
// f_k = P(T_0 = 2k),
//
//   p_k = sum_{j=1..k} f_j p_{k-j},   P(T_0 > n) = 1 - sum_{2k <= n} f_k.
//
// Independent of every Monte Carlo path in the library; O(n^2/4) doubles.

#include <cmath>
#include <cstdint>
#include <vector>

namespace walklab::testing {

inline double return_tail_exact_2d(std::uint64_t n) {
  const std::size_t K = static_cast<std::size_t>(n / 2);  // returns happen at even times
  std::vector<double> p(K + 1), f(K + 1, 0.0);
  p[0] = 1.0;
  for (std::size_t k = 1; k <= K; ++k) {
    const double kk = static_cast<double>(k);
    const double logp =
        2.0 * (std::lgamma(2.0 * kk + 1.0) - 2.0 * std::lgamma(kk + 1.0) -
               2.0 * kk * std::log(2.0));
    p[k] = std::exp(logp);
  }
  double tail = 1.0;
  for (std::size_t k = 1; k <= K; ++k) {
    double conv = 0.0;
    for (std::size_t j = 1; j < k; ++j) conv += f[j] * p[k - j];
    f[k] = p[k] - conv;
    tail -= f[k];
  }
  return tail;
}

// P(T_b > m) = P(T_0 > m + 1) by the one-step time-shift identity
inline double neighbor_tail_exact_2d(std::uint64_t m) { return return_tail_exact_2d(m + 1); }

}  // namespace walklab::testing
