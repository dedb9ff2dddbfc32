#pragma once

// Lattice points of Z^d (d in {2..5}), canonical neighbor enumeration, and
// a packed 64-bit site key used by the sparse range tracker.
//
// Packing assigns floor(64/d) bits per axis with a signed offset, so a key
// fits one machine word for every supported dimension.  Offsets start at 1,
// which keeps the all-zero key free as an "empty slot" sentinel.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace walklab {

inline constexpr int kMinDim = 2;
inline constexpr int kMaxDim = 5;

using Coord = std::int64_t;

struct LatticePoint {
  std::array<Coord, kMaxDim> c{};  // axes >= d stay zero

  Coord& operator[](int axis) { return c[static_cast<std::size_t>(axis)]; }
  Coord operator[](int axis) const { return c[static_cast<std::size_t>(axis)]; }
  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
};

inline LatticePoint origin() { return LatticePoint{}; }

inline void check_dimension(int d) {
  if (d < kMinDim || d > kMaxDim)
    throw std::invalid_argument("dimension must be in [2,5], got " + std::to_string(d));
}

// Canonical direction order: +e1, -e1, +e2, -e2, ...
inline int direction_axis(int dir) { return dir >> 1; }
inline Coord direction_sign(int dir) { return (dir & 1) ? -1 : +1; }

inline LatticePoint neighbor(const LatticePoint& x, int dir) {
  LatticePoint y = x;
  y[direction_axis(dir)] += direction_sign(dir);
  return y;
}

inline std::array<LatticePoint, 10> neighbors_buf(const LatticePoint& x, int d) {
  std::array<LatticePoint, 10> out{};
  for (int dir = 0; dir < 2 * d; ++dir) out[static_cast<std::size_t>(dir)] = neighbor(x, dir);
  return out;
}

inline Coord l1_distance(const LatticePoint& a, const LatticePoint& b, int d) {
  Coord s = 0;
  for (int i = 0; i < d; ++i) {
    Coord diff = a[i] - b[i];
    s += diff < 0 ? -diff : diff;
  }
  return s;
}

inline Coord linf_norm(const LatticePoint& a, int d) {
  Coord m = 0;
  for (int i = 0; i < d; ++i) {
    Coord v = a[i] < 0 ? -a[i] : a[i];
    if (v > m) m = v;
  }
  return m;
}

// --- packed site keys ------------------------------------------------------

struct SitePacking {
  int d;
  int bits;           // bits per axis
  Coord max_abs;      // |coordinate| must stay <= max_abs
  std::array<int, kMaxDim> shift{};
  std::array<std::uint64_t, kMaxDim> stride{};

  explicit SitePacking(int dim) : d(dim) {
    check_dimension(dim);
    bits = 64 / dim;
    // offsets live in [1, 2^bits - 1]; keep one spare step so that probing a
    // neighbor of an in-range site never wraps into another axis
    max_abs = (Coord{1} << (bits - 1)) - 2;
    for (int i = 0; i < dim; ++i) {
      shift[static_cast<std::size_t>(i)] = i * bits;
      stride[static_cast<std::size_t>(i)] = std::uint64_t{1} << (i * bits);
    }
  }

  bool in_range(const LatticePoint& x) const {
    for (int i = 0; i < d; ++i)
      if (x[i] < -max_abs || x[i] > max_abs) return false;
    return true;
  }

  std::uint64_t pack(const LatticePoint& x) const {
    std::uint64_t key = 0;
    const std::uint64_t bias = std::uint64_t{1} << (bits - 1);
    for (int i = 0; i < d; ++i) {
      const std::uint64_t off = bias + static_cast<std::uint64_t>(x[i]);
      key |= off << shift[static_cast<std::size_t>(i)];
    }
    return key;
  }

  LatticePoint unpack(std::uint64_t key) const {
    LatticePoint x{};
    const std::uint64_t mask = (bits == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << bits) - 1);
    const Coord bias = Coord{1} << (bits - 1);
    for (int i = 0; i < d; ++i) {
      const std::uint64_t off = (key >> shift[static_cast<std::size_t>(i)]) & mask;
      x[i] = static_cast<Coord>(off) - bias;
    }
    return x;
  }

  // key of x's neighbor in direction dir; valid whenever x itself is in range
  std::uint64_t neighbor_key(std::uint64_t key, int dir) const {
    const std::uint64_t s = stride[static_cast<std::size_t>(direction_axis(dir))];
    return direction_sign(dir) > 0 ? key + s : key - s;
  }
};

}  // namespace walklab
