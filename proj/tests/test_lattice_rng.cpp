#include <doctest.h>

#include <cmath>
#include <set>

#include "walklab/lattice.hpp"
#include "walklab/rng.hpp"
#include "walklab/walk.hpp"

using namespace walklab;

namespace {
LatticePoint pt2(Coord x, Coord y) {
  LatticePoint p{};
  p[0] = x;
  p[1] = y;
  return p;
}
}  // namespace

TEST_CASE("neighbor enumeration: canonical order and L1 distance") {
  const auto n2 = neighbors_buf(origin(), 2);
  CHECK(n2[0] == pt2(1, 0));
  CHECK(n2[1] == pt2(-1, 0));
  CHECK(n2[2] == pt2(0, 1));
  CHECK(n2[3] == pt2(0, -1));

  LatticePoint x3{};
  x3[0] = x3[1] = x3[2] = 1;
  const auto n3 = neighbors_buf(x3, 3);
  std::set<std::array<Coord, kMaxDim>> distinct;
  for (int i = 0; i < 6; ++i) {
    CHECK(l1_distance(n3[static_cast<std::size_t>(i)], x3, 3) == 1);
    distinct.insert(n3[static_cast<std::size_t>(i)].c);
  }
  CHECK(distinct.size() == 6);

  const auto far = neighbors_buf(pt2(5, -7), 2);
  bool has_up = false, has_left = false;
  for (int i = 0; i < 4; ++i) {
    if (far[static_cast<std::size_t>(i)] == pt2(5, -6)) has_up = true;
    if (far[static_cast<std::size_t>(i)] == pt2(4, -7)) has_left = true;
  }
  CHECK(has_up);
  CHECK(has_left);
}

TEST_CASE("rng streams: pinned outputs and determinism") {
  // frozen stream prefixes; these pin the cross-platform byte sequence
  RngStream a(0, 0);
  CHECK(a.next_u64() == 0xdc29ed9448712d73ULL);
  CHECK(a.next_u64() == 0x6e0d34f0d822919eULL);
  CHECK(a.next_u64() == 0xc312f05342fa8f64ULL);
  RngStream b(0, 1);
  CHECK(b.next_u64() == 0x061feb3bde5bd27bULL);
  RngStream c(12345, 7);
  CHECK(c.next_u64() == 0xe27ffddddddb7c62ULL);
  CHECK(c.next_u64() == 0xe318e53c395e7bf7ULL);

  RngStream r1(42, 3), r2(42, 3);
  for (int i = 0; i < 100; ++i) CHECK(r1.next_u64() == r2.next_u64());
}

TEST_CASE("step: identical rng state gives identical output") {
  RngStream r1(7, 0), r2(7, 0);
  const LatticePoint a = step(origin(), 2, r1);
  const LatticePoint b = step(origin(), 2, r2);
  CHECK(a == b);
}

TEST_CASE("bounded draws are exactly uniform ranges") {
  RngStream rng(11, 0);
  for (int i = 0; i < 1000; ++i) {
    CHECK(rng.next_below(6) < 6);
    CHECK(rng.next_below(10) < 10);
  }
}

TEST_CASE("direction frequencies: d=2 quarter law over 1e6 draws") {
  RngStream rng(1, 0);
  DirectionSampler dirs(2, rng);
  const int N = 1000000;
  int counts[4] = {0, 0, 0, 0};
  for (int i = 0; i < N; ++i) ++counts[dirs.next()];
  for (int dcount : counts)
    CHECK(std::abs(static_cast<double>(dcount) / N - 0.25) < 0.002);
}

TEST_CASE("direction frequencies: d=3 sixth law over 1e6 draws") {
  RngStream rng(2, 0);
  DirectionSampler dirs(3, rng);
  const int N = 1000000;
  int counts[6] = {0, 0, 0, 0, 0, 0};
  for (int i = 0; i < N; ++i) ++counts[dirs.next()];
  CHECK(std::abs(static_cast<double>(counts[0]) / N - 1.0 / 6.0) < 0.002);
  for (int dcount : counts)
    CHECK(std::abs(static_cast<double>(dcount) / N - 1.0 / 6.0) < 0.002);
}

TEST_CASE("direction frequencies: 4-sigma property band across dimensions") {
  const int N = 200000;
  for (int d = 2; d <= 5; ++d) {
    RngStream rng(5, static_cast<std::uint64_t>(d));
    DirectionSampler dirs(d, rng);
    std::vector<int> counts(static_cast<std::size_t>(2 * d), 0);
    for (int i = 0; i < N; ++i) ++counts[static_cast<std::size_t>(dirs.next())];
    const double p = 1.0 / (2.0 * d);
    const double band = 4.0 * std::sqrt(p * (1.0 - p) / N);
    for (int c : counts) CHECK(std::abs(static_cast<double>(c) / N - p) < band);
  }
}

TEST_CASE("generate_walk: base cases and unit increments") {
  RngStream rng(3, 0);
  const WalkPath p0 = generate_walk(2, 0, rng);
  CHECK(p0.points.size() == 1);
  CHECK(p0.points[0] == origin());

  RngStream ra(9, 4), rb(9, 4);
  const WalkPath pa = generate_walk(3, 10, ra);
  const WalkPath pb = generate_walk(3, 10, rb);
  CHECK(pa.points == pb.points);

  for (int d = 2; d <= 5; ++d) {
    RngStream rw(17, static_cast<std::uint64_t>(d));
    const WalkPath path = generate_walk(d, 2000, rw);
    CHECK(path.points[0] == origin());
    for (std::size_t t = 1; t < path.points.size(); ++t)
      CHECK(l1_distance(path.points[t], path.points[t - 1], d) == 1);
  }
}

TEST_CASE("generate_walk rejects lengths beyond the horizon cap") {
  RngStream rng(0, 0);
  CHECK_THROWS_AS(generate_walk(2, kHorizonCap + 1, rng), std::invalid_argument);
}

TEST_CASE("walk displacement matches the diffusive norm law" * doctest::timeout(120)) {
  // E|S_n| for the 2-d walk approaches sqrt(pi n)/2 by the CLT
  const std::uint64_t n = 1000000;
  const int trials = 200;
  double sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    RngStream rng(100, static_cast<std::uint64_t>(t));
    DirectionSampler dirs(2, rng);
    Coord x = 0, y = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      switch (dirs.next()) {
        case 0: ++x; break;
        case 1: --x; break;
        case 2: ++y; break;
        default: --y; break;
      }
    }
    sum += std::sqrt(static_cast<double>(x) * x + static_cast<double>(y) * y);
  }
  const double mean = sum / trials;
  const double target = std::sqrt(M_PI * static_cast<double>(n)) / 2.0;
  CHECK(mean > target * 0.95);
  CHECK(mean < target * 1.05);
}

TEST_CASE("direction log materializes to the generated path") {
  RngStream rng(21, 5);
  DirectionSampler dirs(2, rng);
  DirectionLog log;
  log.d = 2;
  for (int i = 0; i < 200; ++i) log.dirs.push_back(static_cast<std::uint8_t>(dirs.next()));
  const WalkPath path = log.materialize();
  CHECK(path.points.size() == 201);
  for (std::size_t t = 1; t < path.points.size(); ++t)
    CHECK(l1_distance(path.points[t], path.points[t - 1], 2) == 1);
}

TEST_CASE("site packing round-trips and neighbor keys") {
  for (int d = 2; d <= 5; ++d) {
    const SitePacking packing(d);
    RngStream rng(33, static_cast<std::uint64_t>(d));
    for (int i = 0; i < 500; ++i) {
      LatticePoint p{};
      for (int a = 0; a < d; ++a)
        p[a] = static_cast<Coord>(rng.next_below(2000)) - 1000;
      CHECK(packing.in_range(p));
      const std::uint64_t key = packing.pack(p);
      CHECK(packing.unpack(key) == p);
      const int dir = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(2 * d)));
      CHECK(packing.neighbor_key(key, dir) == packing.pack(neighbor(p, dir)));
    }
  }
}
