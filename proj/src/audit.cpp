#include "walklab/audit.hpp"

#include <stdexcept>
#include <vector>

#include "walklab/range_tracker.hpp"
#include "walklab/rng.hpp"
#include "walklab/walk.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace walklab {

namespace {

struct Counters {
  std::uint64_t mism = 0, recount = 0, nest_checks = 0, nest_fail = 0, dnest_checks = 0,
                dnest_fail = 0;
  void operator+=(const Counters& o) {
    mism += o.mism;
    recount += o.recount;
    nest_checks += o.nest_checks;
    nest_fail += o.nest_fail;
    dnest_checks += o.dnest_checks;
    dnest_fail += o.dnest_fail;
  }
};

Counters audit_one_path(int d, std::uint64_t path_len, std::uint64_t master_seed,
                        std::uint64_t path_id) {
  Counters c;
  RngStream rng(master_seed, path_id);
  const WalkPath path = generate_walk(d, path_len, rng);

  // incremental tracker vs from-scratch rebuild at an interior prefix and at the end
  RangeState state(d);
  const std::uint64_t mid = 1 + rng.next_below(path_len);
  for (std::uint64_t t = 1; t <= path_len; ++t) {
    state.advance(path.points[t]);
    if (t == mid || t == path_len) {
      if (!states_agree(state, recompute_from_scratch(path, 0, t))) ++c.mism;
      if (state.audit_recount_boundary() != state.boundary_count()) ++c.recount;
    }
  }

  // nested intervals I0 c I1 c I2: draw 0 <= l2 <= l1 <= l0 <= r0 <= r1 <= r2 <= n
  const SitePacking packing(d);
  for (int rep = 0; rep < 4; ++rep) {
    std::uint64_t cuts[6];
    for (auto& v : cuts) v = rng.next_below(path_len + 1);
    std::sort(std::begin(cuts), std::end(cuts));
    const std::uint64_t l2 = cuts[0], l1 = cuts[1], l0 = cuts[2];
    const std::uint64_t r0 = cuts[3], r1 = cuts[4], r2 = cuts[5];
    const ScratchRange inner = recompute_from_scratch(path, l0, r0);
    const ScratchRange middle = recompute_from_scratch(path, l1, r1);
    const ScratchRange outer = recompute_from_scratch(path, l2, r2);
    const int b_dir = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(2 * d)));
    for (std::uint64_t key : inner.keys) {
      if (outer.is_inner_boundary(key)) {
        ++c.nest_checks;
        if (!middle.is_inner_boundary(key)) ++c.nest_fail;
      }
      if (outer.is_directional_boundary(packing, key, b_dir)) {
        ++c.dnest_checks;
        if (!middle.is_directional_boundary(packing, key, b_dir)) ++c.dnest_fail;
      }
    }
  }
  return c;
}

std::uint64_t enumerate_mismatches(int d, int n) {
  // every path of length n, incremental vs scratch
  std::uint64_t mism = 0;
  std::vector<int> dirs(static_cast<std::size_t>(n), 0);
  for (;;) {
    WalkPath path;
    path.d = d;
    path.points.push_back(origin());
    RangeState state(d, {}, 64);
    for (int j = 0; j < n; ++j) {
      path.points.push_back(neighbor(path.points.back(), dirs[static_cast<std::size_t>(j)]));
      state.advance(path.points.back());
    }
    if (!states_agree(state, recompute_from_scratch(path, 0, static_cast<std::uint64_t>(n))))
      ++mism;
    int axis = 0;
    for (; axis < n; ++axis) {
      if (++dirs[static_cast<std::size_t>(axis)] < 2 * d) break;
      dirs[static_cast<std::size_t>(axis)] = 0;
    }
    if (axis == n) break;
  }
  return mism;
}

}  // namespace

AuditReport audit_tracker(int d, std::uint64_t n_paths, std::uint64_t path_len,
                          std::uint64_t master_seed, int enumerate_n, int threads) {
  check_dimension(d);
  if (path_len < 2) throw std::invalid_argument("audit: path length must be >= 2");
  AuditReport report;
  report.random_paths = n_paths;

  Counters total;
#ifdef _OPENMP
#pragma omp parallel num_threads(threads > 0 ? threads : 1)
#endif
  {
    Counters local;
#ifdef _OPENMP
#pragma omp for schedule(dynamic)
#endif
    for (long long p = 0; p < static_cast<long long>(n_paths); ++p)
      local += audit_one_path(d, path_len, master_seed, static_cast<std::uint64_t>(p));
#ifdef _OPENMP
#pragma omp critical
#endif
    total += local;
  }
  report.random_mismatches = total.mism;
  report.boundary_recount_mismatches = total.recount;
  report.nesting_checks = total.nest_checks;
  report.nesting_failures = total.nest_fail;
  report.directional_nesting_checks = total.dnest_checks;
  report.directional_nesting_failures = total.dnest_fail;

  if (enumerate_n > 0) {
    std::uint64_t paths = 1;
    for (int i = 0; i < enumerate_n; ++i) paths *= static_cast<std::uint64_t>(2 * d);
    report.enumerated_paths = paths;
    report.enumerated_mismatches = enumerate_mismatches(d, enumerate_n);
  }
  return report;
}

}  // namespace walklab
