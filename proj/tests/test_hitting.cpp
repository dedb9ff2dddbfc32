#include <doctest.h>

#include <cmath>

#include "support/return_time_oracle.hpp"
#include "walklab/bracket.hpp"
#include "walklab/hitting.hpp"
#include "walklab/rng.hpp"
#include "walklab/stats_util.hpp"

using namespace walklab;

TEST_CASE("truncated race: exact small-cap values") {
  // {T_0 < T_b ^ 2} is empty: a return needs two steps
  const HittingEstimate p2 = estimate_truncated(2, 0, 2, 20000, 1);
  CHECK(p2.probability == 0.0);

  // {T_0 < T_b ^ 3} = 3/16
  const HittingEstimate p3 = estimate_truncated(2, 0, 3, 200000, 2);
  CHECK(std::abs(p3.probability - 3.0 / 16.0) < 5.0 * std::sqrt(0.1875 * 0.8125 / 200000.0));
  CHECK(p3.n_undecided == 0);
  CHECK(p3.p_pessimistic == p3.probability);
}

TEST_CASE("truncated race: monotone in the cap within confidence bands") {
  const HittingEstimate p4 = estimate_truncated(2, 0, 4, 100000, 3);
  const HittingEstimate p8 = estimate_truncated(2, 0, 8, 100000, 4);
  CHECK(p8.probability >= p4.probability - (p4.half_width + p8.half_width));
}

TEST_CASE("tails: exact two-step value and the time-shift identity") {
  const HittingEstimate t2 = estimate_tail(2, HitTarget::ReturnTail, 2, 200000, 5);
  CHECK(std::abs(t2.probability - 0.75) < 5.0 * std::sqrt(0.75 * 0.25 / 200000.0));

  // P(T_0 > a) = P(T_b > a-1) for a in {2, 4, 8}; independent streams per side
  const std::vector<std::uint64_t> a_grid = {2, 4, 8};
  const std::vector<std::uint64_t> b_grid = {1, 3, 7};
  const auto lhs = estimate_tail_grid(2, HitTarget::ReturnTail, a_grid, 150000, 6);
  const auto rhs = estimate_tail_grid(2, HitTarget::NeighborTail, b_grid, 150000, 7);
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    const double joint = 3.0 * std::hypot(lhs[i].half_width / kZ95, rhs[i].half_width / kZ95);
    CHECK(std::abs(lhs[i].probability - rhs[i].probability) < joint);
  }
}

TEST_CASE("tails match the exact renewal recursion") {
  // frozen oracle values from the first-return recursion
  CHECK(testing::return_tail_exact_2d(2) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(testing::return_tail_exact_2d(4) == doctest::Approx(43.0 / 64.0).epsilon(1e-12));
  CHECK(testing::return_tail_exact_2d(100) == doctest::Approx(0.416778).epsilon(1e-5));
  CHECK(testing::return_tail_exact_2d(1000) == doctest::Approx(0.321777).epsilon(1e-5));

  const std::uint64_t trials = 200000;
  const HittingEstimate t100 = estimate_tail(2, HitTarget::ReturnTail, 100, trials, 31);
  const double exact100 = testing::return_tail_exact_2d(100);
  CHECK(std::abs(t100.probability - exact100) <
        5.0 * std::sqrt(exact100 * (1 - exact100) / static_cast<double>(trials)));

  const HittingEstimate tb99 = estimate_tail(2, HitTarget::NeighborTail, 99, trials, 32);
  const double exactb99 = testing::neighbor_tail_exact_2d(99);
  CHECK(std::abs(tb99.probability - exactb99) <
        5.0 * std::sqrt(exactb99 * (1 - exactb99) / static_cast<double>(trials)));
}

TEST_CASE("tail grid is nonincreasing in m and consistent with single estimates") {
  const std::vector<std::uint64_t> grid = {1, 2, 4, 8, 16};
  const auto ests = estimate_tail_grid(3, HitTarget::JointTail, grid, 50000, 8);
  for (std::size_t i = 1; i < ests.size(); ++i)
    CHECK(ests[i].probability <= ests[i - 1].probability);
  const HittingEstimate single = estimate_tail(3, HitTarget::JointTail, 4, 50000, 8);
  CHECK(single.probability == ests[2].probability);  // same seed, same trials
}

TEST_CASE("race requires a cutoff policy and at least one trial") {
  CHECK_THROWS_AS(
      estimate_return_before_neighbor(2, 0, CutoffPolicy::none(), 100, 0, nullptr, 1),
      std::invalid_argument);
  CHECK_THROWS_AS(
      estimate_return_before_neighbor(3, 0, CutoffPolicy::none(), 100, 0, nullptr, 1),
      std::invalid_argument);
  CHECK_THROWS_AS(
      estimate_return_before_neighbor(2, 0, CutoffPolicy::radius_cap(10), 0, 0, nullptr, 1),
      std::invalid_argument);
  CHECK_THROWS_AS(
      estimate_return_before_neighbor(2, 9, CutoffPolicy::radius_cap(10), 5, 0, nullptr, 1),
      std::invalid_argument);
  CHECK_THROWS_AS(estimate_truncated(2, 0, 0, 5, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(estimate_tail(2, HitTarget::ReturnTail, 0, 5, 0, 0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate_tail(2, HitTarget::TruncatedReturn, 3, 5, 0, 0, 1),
                  std::invalid_argument);
}

TEST_CASE("a first step onto b loses the race immediately") {
  // find a stream whose first direction draw is 0 (= +e1 = b)
  std::uint64_t seed = 0;
  for (;; ++seed) {
    RngStream probe(seed, 0);
    DirectionSampler dirs(2, probe);
    if (dirs.next() == 0) break;
  }
  RngStream rng(seed, 0);
  CHECK(race_trial(2, 0, CutoffPolicy::radius_cap(100), rng, nullptr) == RaceOutcome::BFirst);

  const HittingEstimate est =
      estimate_return_before_neighbor(2, 0, CutoffPolicy::radius_cap(100), 1, seed, nullptr, 1);
  CHECK(est.probability == 0.0);
  CHECK(est.n_failure == 1);
}

TEST_CASE("step-capped race matches the truncated event") {
  // a race capped after step k decides exactly {T_0 < T_b ^ (k+1)}
  const HittingEstimate race = estimate_return_before_neighbor(
      2, 0, CutoffPolicy::step_cap(64), 50000, 19, nullptr, 1);
  const HittingEstimate trunc = estimate_truncated(2, 0, 65, 50000, 19);
  CHECK(race.p_pessimistic == trunc.probability);  // same streams, same decision sequence
  CHECK(race.p_optimistic >= 0.5 - race.half_width);
  CHECK(race.p_pessimistic <= 0.5 + race.half_width);
}

TEST_CASE("d=2 race: pessimistic and optimistic scores straddle one half") {
  const HittingEstimate est = estimate_return_before_neighbor(
      2, 0, CutoffPolicy::radius_cap(300), 40000, 11, nullptr, 1);
  CHECK(est.p_pessimistic < 0.5);
  CHECK(est.p_optimistic > 0.5);
  CHECK(std::abs(est.probability - 0.5) < 0.02);
  CHECK(est.half_width <= kZ95 * std::sqrt(0.25 / 40000.0) +
                              0.5 * (est.p_optimistic - est.p_pessimistic) + 1e-12);
  CHECK(est.n_success + est.n_failure + est.n_undecided == est.trials);
}

TEST_CASE("jump-accelerated race agrees with plain stepping in law") {
  const JumpTables jumps = JumpTables::build(2, {8, 32});
  const HittingEstimate plain = estimate_return_before_neighbor(
      2, 0, CutoffPolicy::radius_cap(300), 40000, 12, nullptr, 1);
  const HittingEstimate jumped = estimate_return_before_neighbor(
      2, 0, CutoffPolicy::radius_cap(300), 40000, 13, &jumps, 1);
  const double joint = 3.0 * std::hypot(plain.half_width, jumped.half_width);
  CHECK(std::abs(plain.probability - jumped.probability) < joint);
  // jumps may only shrink the undecided mass (they stop later, never earlier)
  CHECK(jumped.n_undecided <= plain.n_undecided * 2);
}

TEST_CASE("race estimates are invariant under the choice of b") {
  const JumpTables jumps = JumpTables::build(2, {8, 32});
  std::vector<HittingEstimate> per_direction;
  for (int b = 0; b < 4; ++b)
    per_direction.push_back(estimate_return_before_neighbor(
        2, b, CutoffPolicy::radius_cap(200), 30000, 14 + static_cast<std::uint64_t>(b), &jumps, 1));
  for (int b = 1; b < 4; ++b) {
    const double joint =
        3.0 * std::hypot(per_direction[0].half_width, per_direction[static_cast<std::size_t>(b)].half_width);
    CHECK(std::abs(per_direction[0].probability -
                   per_direction[static_cast<std::size_t>(b)].probability) < joint);
  }
}

TEST_CASE("d=3 race: pessimistic score estimates the two-point hit probability") {
  const JumpTables jumps = JumpTables::build(3, {4, 16});
  const HittingEstimate est = estimate_return_before_neighbor(
      3, 0, CutoffPolicy::radius_cap(1000), 40000, 15, &jumps, 1);
  // known value P(T_0 < T_b) ~= 0.2540 in d=3; the radius-1000 bias is ~1e-3
  CHECK(std::abs(est.p_pessimistic - 0.2540) < 0.012);
  // most escaped walks never return, so the optimistic score sits near 0.75
  CHECK(est.p_optimistic > 0.6);
}

TEST_CASE("monte carlo estimates sit inside the certified bracket at matched scales") {
  // d=2: race capped at radius 100 vs the L=100 absorbing box
  const HittingEstimate mc2 = estimate_return_before_neighbor(
      2, 0, CutoffPolicy::radius_cap(100), 30000, 21, nullptr, 1);
  const ExactBracket br2 = exact_bracket_2d(0, 100);
  CHECK(mc2.p_pessimistic >= br2.lower - mc2.half_width);
  CHECK(mc2.probability <= br2.upper + mc2.half_width);

  // d=3: race capped at radius 1000 vs the L=10 box (nested-scale consistency)
  const JumpTables jumps3 = JumpTables::build(3, {4, 16});
  const HittingEstimate mc3 = estimate_return_before_neighbor(
      3, 0, CutoffPolicy::radius_cap(1000), 30000, 22, &jumps3, 1);
  const ExactBracket br3 = exact_bracket_highd(3, 0, 10);
  CHECK(mc3.p_pessimistic >= br3.lower - mc3.half_width);
  CHECK(mc3.probability <= br3.upper + mc3.half_width);
}

TEST_CASE("farm counts are thread-count independent") {
  const JumpTables jumps = JumpTables::build(2, {8, 32});
  const HittingEstimate a = estimate_return_before_neighbor(
      2, 0, CutoffPolicy::radius_cap(500), 20000, 16, &jumps, 1);
  const HittingEstimate b = estimate_return_before_neighbor(
      2, 0, CutoffPolicy::radius_cap(500), 20000, 16, &jumps, 4);
  CHECK(a.n_success == b.n_success);
  CHECK(a.n_failure == b.n_failure);
  CHECK(a.n_undecided == b.n_undecided);
}

TEST_CASE("jump tables validate their inputs") {
  const JumpTables jumps = JumpTables::build(2, {8});
  CHECK_THROWS_AS(
      estimate_return_before_neighbor(3, 0, CutoffPolicy::radius_cap(100), 10, 0, &jumps, 1),
      std::invalid_argument);
  CHECK_THROWS_AS(JumpTables::build(2, {8, 4}), std::invalid_argument);
  CHECK_THROWS_AS(JumpTables::build(2, {1}), std::invalid_argument);
  RngStream rng(0, 0);
  CHECK_THROWS_AS(jumps.sample(16, rng), std::invalid_argument);
  CHECK(jumps.usable_radius(7) == 0);
  CHECK(jumps.usable_radius(8) == 8);
  CHECK(jumps.usable_radius(100) == 8);
}
