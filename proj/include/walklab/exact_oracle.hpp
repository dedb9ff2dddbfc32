#pragma once

// Exhaustive enumeration over all (2d)^n walks of length n: exact rational
// expectations and full distributions of the range statistics, plus exact
// probabilities of the hitting events.  Ground truth for the Monte Carlo
// estimators and for the incremental tracker.

#include <cstdint>
#include <map>
#include <string>

namespace walklab {

inline constexpr std::uint64_t kOraclePathBudget = 100000000;  // (2d)^n must stay within

enum class OracleStatistic {
  M,           // max visits over the inner boundary
  M0,          // max visits over the whole range
  L,           // inner-boundary size
  RangeSize,
  JMultiplicity,  // boundary sites visited exactly p times
  ThetaCount,     // boundary sites with visits >= threshold
};

struct OracleParams {
  int p = 1;                  // multiplicity for JMultiplicity
  double threshold = 1.0;     // visit threshold for ThetaCount
};

enum class HitEventKind {
  TruncatedReturn,  // {T_0 < T_b ^ k},  value = k
  ReturnTailGT,     // {T_0 > m},        value = m
  NeighborTailGT,   // {T_b > m},        value = m
  JointTailGT,      // {T_0 ^ T_b > m},  value = m
};

struct HitEvent {
  HitEventKind kind = HitEventKind::TruncatedReturn;
  std::uint64_t value = 1;
  int b_dir = 0;
};

struct ExactResult {
  int d = 2;
  int n = 0;  // enumerated path length
  std::string statistic;
  long long expectation_num = 0;  // reduced fraction; den > 0
  unsigned long long expectation_den = 1;
  std::map<long long, unsigned long long> distribution;  // value -> path count

  double as_double() const {
    return static_cast<double>(expectation_num) / static_cast<double>(expectation_den);
  }
};

ExactResult enumerate(int d, int n, OracleStatistic stat, OracleParams params = {},
                      int threads = 1);

// Exact probability of a hitting event.  horizon must cover the event's
// decision time (k-1 for the truncated race, m for the tails); enumeration
// stops at the decision time since later steps cannot change the outcome.
ExactResult enumerate_hitting(int d, HitEvent event, int horizon, int threads = 1);

const char* statistic_name(OracleStatistic stat);
const char* hit_event_name(HitEventKind kind);

}  // namespace walklab
