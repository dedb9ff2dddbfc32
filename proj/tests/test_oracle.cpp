#include <doctest.h>

#include <cmath>

#include "walklab/exact_oracle.hpp"
#include "walklab/range_stats.hpp"
#include "walklab/range_tracker.hpp"
#include "walklab/rng.hpp"
#include "walklab/walk.hpp"

using namespace walklab;

TEST_CASE("exact expectations over the sixteen two-step walks") {
  const ExactResult m = enumerate(2, 2, OracleStatistic::M);
  CHECK(m.expectation_num == 5);
  CHECK(m.expectation_den == 4);
  CHECK(m.distribution.at(1) == 12);
  CHECK(m.distribution.at(2) == 4);

  const ExactResult l = enumerate(2, 2, OracleStatistic::L);
  CHECK(l.expectation_num == 11);
  CHECK(l.expectation_den == 4);
  CHECK(l.distribution.at(2) == 4);
  CHECK(l.distribution.at(3) == 12);

  const ExactResult m0 = enumerate(2, 2, OracleStatistic::M0);
  CHECK(m0.expectation_num == 5);
  CHECK(m0.expectation_den == 4);

  OracleParams j1;
  j1.p = 1;
  const ExactResult ej1 = enumerate(2, 2, OracleStatistic::JMultiplicity, j1);
  CHECK(ej1.expectation_num == 5);
  CHECK(ej1.expectation_den == 2);
  OracleParams j2;
  j2.p = 2;
  const ExactResult ej2 = enumerate(2, 2, OracleStatistic::JMultiplicity, j2);
  CHECK(ej2.expectation_num == 1);
  CHECK(ej2.expectation_den == 4);
}

TEST_CASE("every one-step walk has a two-point all-boundary range") {
  const ExactResult l = enumerate(2, 1, OracleStatistic::L);
  CHECK(l.expectation_num == 2);
  CHECK(l.expectation_den == 1);
  CHECK(l.distribution.size() == 1);
  CHECK(l.distribution.at(2) == 4);
}

TEST_CASE("theta count with threshold 1 reproduces the boundary size") {
  OracleParams params;
  params.threshold = 1.0;
  const ExactResult theta = enumerate(2, 2, OracleStatistic::ThetaCount, params);
  const ExactResult l = enumerate(2, 2, OracleStatistic::L);
  CHECK(theta.distribution == l.distribution);
}

TEST_CASE("path budget guard") {
  CHECK_THROWS_AS(enumerate(2, 14, OracleStatistic::M), std::invalid_argument);
  CHECK_THROWS_AS(enumerate(3, 11, OracleStatistic::M), std::invalid_argument);
}

TEST_CASE("hitting events: exact small probabilities") {
  HitEvent trunc3{HitEventKind::TruncatedReturn, 3, 0};
  const ExactResult p3 = enumerate_hitting(2, trunc3, 2);
  CHECK(p3.expectation_num == 3);
  CHECK(p3.expectation_den == 16);

  HitEvent trunc2{HitEventKind::TruncatedReturn, 2, 0};
  const ExactResult p2 = enumerate_hitting(2, trunc2, 1);
  CHECK(p2.expectation_num == 0);

  HitEvent tail0{HitEventKind::ReturnTailGT, 2, 0};
  const ExactResult t0 = enumerate_hitting(2, tail0, 2);
  CHECK(t0.expectation_num == 3);
  CHECK(t0.expectation_den == 4);

  HitEvent tailb{HitEventKind::NeighborTailGT, 1, 0};
  const ExactResult tb = enumerate_hitting(2, tailb, 1);
  CHECK(tb.expectation_num == 3);
  CHECK(tb.expectation_den == 4);

  // the time-shift identity P(T_0 >= a+1) = P(T_b >= a) at a = 2
  HitEvent tail0_a{HitEventKind::ReturnTailGT, 2, 0};
  HitEvent tailb_a{HitEventKind::NeighborTailGT, 1, 0};
  const ExactResult lhs = enumerate_hitting(2, tail0_a, 4);
  const ExactResult rhs = enumerate_hitting(2, tailb_a, 4);
  CHECK(lhs.expectation_num * static_cast<long long>(rhs.expectation_den) ==
        rhs.expectation_num * static_cast<long long>(lhs.expectation_den));
}

TEST_CASE("hitting events validate the horizon") {
  HitEvent tail{HitEventKind::ReturnTailGT, 8, 0};
  CHECK_THROWS_AS(enumerate_hitting(2, tail, 7), std::invalid_argument);
}

TEST_CASE("truncation monotone in k and dominated by the tails") {
  long long prev_num = 0;
  unsigned long long prev_den = 1;
  for (std::uint64_t k = 2; k <= 8; ++k) {
    HitEvent e{HitEventKind::TruncatedReturn, k, 0};
    const ExactResult r = enumerate_hitting(2, e, static_cast<int>(k - 1));
    // nondecreasing in k: r >= prev as fractions
    CHECK(r.expectation_num * static_cast<long long>(prev_den) >=
          prev_num * static_cast<long long>(r.expectation_den));
    prev_num = r.expectation_num;
    prev_den = r.expectation_den;
  }
}

TEST_CASE("distribution masses always sum to (2d)^n") {
  for (int d = 2; d <= 3; ++d) {
    const ExactResult r = enumerate(d, 4, OracleStatistic::RangeSize);
    unsigned long long total = 0;
    for (const auto& [v, c] : r.distribution) total += c;
    unsigned long long expect = 1;
    for (int i = 0; i < 4; ++i) expect *= static_cast<unsigned long long>(2 * d);
    CHECK(total == expect);
  }
}

TEST_CASE("enumeration matches an independent set-based recomputation at n = 4") {
  // walk every path explicitly, evaluate through the scratch rebuilder, and
  // compare whole distributions
  const int n = 4;
  std::map<long long, unsigned long long> m_dist, l_dist;
  std::vector<int> dirs(n, 0);
  for (;;) {
    WalkPath path;
    path.d = 2;
    path.points.push_back(origin());
    for (int j = 0; j < n; ++j)
      path.points.push_back(neighbor(path.points.back(), dirs[static_cast<std::size_t>(j)]));
    const ScratchRange scratch = recompute_from_scratch(path, 0, n);
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < scratch.keys.size(); ++i)
      if (scratch.nbrs[i] < 4 && scratch.visits[i] > m) m = scratch.visits[i];
    ++m_dist[static_cast<long long>(m)];
    ++l_dist[static_cast<long long>(scratch.boundary_count)];
    int axis = 0;
    for (; axis < n; ++axis) {
      if (++dirs[static_cast<std::size_t>(axis)] < 4) break;
      dirs[static_cast<std::size_t>(axis)] = 0;
    }
    if (axis == n) break;
  }
  CHECK(enumerate(2, n, OracleStatistic::M).distribution == m_dist);
  CHECK(enumerate(2, n, OracleStatistic::L).distribution == l_dist);
}

TEST_CASE("thread count never changes oracle results") {
  const ExactResult serial = enumerate(2, 6, OracleStatistic::L, {}, 1);
  const ExactResult parallel = enumerate(2, 6, OracleStatistic::L, {}, 4);
  CHECK(serial.distribution == parallel.distribution);
  CHECK(serial.expectation_num == parallel.expectation_num);
  CHECK(serial.expectation_den == parallel.expectation_den);

  HitEvent e{HitEventKind::TruncatedReturn, 7, 0};
  const ExactResult hs = enumerate_hitting(2, e, 6, 1);
  const ExactResult hp = enumerate_hitting(2, e, 6, 4);
  CHECK(hs.expectation_num == hp.expectation_num);
  CHECK(hs.expectation_den == hp.expectation_den);
}

TEST_CASE("monte carlo means sit inside four standard errors of exact values") {
  // a fast version of the oracle/monte-carlo cross-check (n = 6, 3e4 trials)
  const int n = 6;
  const std::uint64_t trials = 30000;
  const ExactResult exact_m = enumerate(2, n, OracleStatistic::M);
  const ExactResult exact_l = enumerate(2, n, OracleStatistic::L);
  double sum_m = 0, sum_l = 0, sq_m = 0, sq_l = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    RngStream rng(131, t);
    DirectionSampler ds(2, rng);
    RangeState s(2, {}, 64);
    for (int i = 0; i < n; ++i) s.advance_dir(ds.next());
    std::uint64_t m = 0;
    s.for_each_site([&](std::uint64_t, std::uint32_t v, std::uint8_t nb) {
      if (nb < 4 && v > m) m = v;
    });
    sum_m += static_cast<double>(m);
    sq_m += static_cast<double>(m) * static_cast<double>(m);
    sum_l += static_cast<double>(s.boundary_count());
    sq_l += static_cast<double>(s.boundary_count()) * static_cast<double>(s.boundary_count());
  }
  const double T = static_cast<double>(trials);
  const double mean_m = sum_m / T, mean_l = sum_l / T;
  const double se_m = std::sqrt((sq_m / T - mean_m * mean_m) / T);
  const double se_l = std::sqrt((sq_l / T - mean_l * mean_l) / T);
  CHECK(std::abs(mean_m - exact_m.as_double()) < 4.0 * se_m);
  CHECK(std::abs(mean_l - exact_l.as_double()) < 4.0 * se_l);
}
