#pragma once

// Tracker audit sweeps: incremental state vs from-scratch recomputation on
// random paths and on exhaustively enumerated short paths, plus the interval
// nesting properties  R(I0) n dR(I2) c dR(I1)  and their directional
// counterparts on sampled nested intervals.

#include <cstdint>

namespace walklab {

struct AuditReport {
  std::uint64_t random_paths = 0;
  std::uint64_t random_mismatches = 0;
  std::uint64_t boundary_recount_mismatches = 0;
  std::uint64_t nesting_checks = 0;
  std::uint64_t nesting_failures = 0;
  std::uint64_t directional_nesting_checks = 0;
  std::uint64_t directional_nesting_failures = 0;
  std::uint64_t enumerated_paths = 0;
  std::uint64_t enumerated_mismatches = 0;

  bool passed() const {
    return random_mismatches == 0 && boundary_recount_mismatches == 0 &&
           nesting_failures == 0 && directional_nesting_failures == 0 &&
           enumerated_mismatches == 0;
  }
};

// Random-path sweep (incremental vs scratch, boundary recount, nesting) plus
// an optional exhaustive sweep over all paths of length enumerate_n (0 = off).
AuditReport audit_tracker(int d, std::uint64_t n_paths, std::uint64_t path_len,
                          std::uint64_t master_seed, int enumerate_n = 0, int threads = 1);

}  // namespace walklab
