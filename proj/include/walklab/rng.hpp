#pragma once

// Counter-based random streams.
//
// A stream is the SplitMix64 sequence started at a key derived from
// (master_seed, stream_id), so (master_seed, stream_id, counter) fully
// determines every draw.  Trials own disjoint stream ids and can run on any
// thread in any order without coordination; replaying a trial reproduces its
// walk bit for bit on every platform.

#include <cstdint>

namespace walklab {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Stafford mix13 finalizer, the SplitMix64 output function.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stateless hash of (key, data); used to derive stream keys and salts.
inline constexpr std::uint64_t hash64(std::uint64_t key, std::uint64_t data) {
  return mix64((key ^ data) + kGolden);
}

class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : state_(hash64(master_seed, hash64(stream_id, 0x5851f42d4c957f2dULL))) {}

  std::uint64_t next_u64() {
    state_ += kGolden;
    return mix64(state_);
  }

  // uniform on [0,1) with 53 random bits
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // exact uniform draw on [0, n); Lemire multiply with rejection, so every
  // value has probability exactly 1/n
  std::uint64_t next_below(std::uint64_t n) {
    for (;;) {
      const std::uint64_t x = next_u64();
      const unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
      const std::uint64_t lo = static_cast<std::uint64_t>(m);
      if (lo >= n) return static_cast<std::uint64_t>(m >> 64);
      const std::uint64_t threshold = (0 - n) % n;
      if (lo >= threshold) return static_cast<std::uint64_t>(m >> 64);
    }
  }

 private:
  std::uint64_t state_;
};

// Draws directions uniformly on [0, 2d) from batched random bits.  2d is a
// power of two for d in {2,4}; for d in {3,5} out-of-range bit patterns are
// rejected, which keeps each direction at probability exactly 1/(2d).
class DirectionSampler {
 public:
  DirectionSampler(int d, RngStream& rng)
      : rng_(&rng), n_dirs_(static_cast<std::uint32_t>(2 * d)) {
    bits_per_draw_ = 1;
    while ((1u << bits_per_draw_) < n_dirs_) ++bits_per_draw_;
  }

  int next() {
    const std::uint32_t mask = (1u << bits_per_draw_) - 1;
    for (;;) {
      if (avail_ < bits_per_draw_) {
        buf_ = rng_->next_u64();
        avail_ = 64;
      }
      const std::uint32_t v = static_cast<std::uint32_t>(buf_) & mask;
      buf_ >>= bits_per_draw_;
      avail_ -= bits_per_draw_;
      if (v < n_dirs_) return static_cast<int>(v);
    }
  }

 private:
  RngStream* rng_;
  std::uint32_t n_dirs_;
  unsigned bits_per_draw_;
  std::uint64_t buf_ = 0;
  unsigned avail_ = 0;
};

}  // namespace walklab
