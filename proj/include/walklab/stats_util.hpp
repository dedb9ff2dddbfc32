#pragma once

// Small statistical helpers: binomial confidence intervals and streaming
// mean / standard-error accumulation with a fixed summation order.

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace walklab {

inline constexpr double kZ95 = 1.959963984540054;

// Normal-approximation half-width with a Wilson-score fallback when the
// count of successes or failures is small (truncated probabilities at small
// step caps are tiny, where the normal interval collapses to zero width).
inline double binomial_half_width(std::uint64_t successes, std::uint64_t trials,
                                  double z = kZ95) {
  if (trials == 0) return 1.0;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double small = 10.0;
  if (static_cast<double>(successes) < small ||
      static_cast<double>(trials - successes) < small) {
    // Wilson score interval; report its half-width
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double half = (z / denom) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    return half;
  }
  return z * std::sqrt(p * (1.0 - p) / n);
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  std::uint64_t count = 0;
};

// Mean / standard error / extrema over a fixed-order sequence of values.
inline MeanSe summarize(const std::vector<double>& values) {
  MeanSe out;
  out.count = values.size();
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) {
    sum += v;
    if (v < out.min) out.min = v;
    if (v > out.max) out.max = v;
  }
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) {
      const double d = v - out.mean;
      ss += d * d;
    }
    const double var = ss / static_cast<double>(values.size() - 1);
    out.se = std::sqrt(var / static_cast<double>(values.size()));
  }
  return out;
}

}  // namespace walklab
