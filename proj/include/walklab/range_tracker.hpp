#pragma once

// Incremental range tracker.
//
// Maintains, one step at a time: the visited set R(n), per-site visit counts
// K(n,x), per-site counts of in-range neighbors, and the inner-boundary size
// L_n.  A site x belongs to the inner boundary while fewer than 2d of its
// neighbors are in the range; it leaves the boundary exactly at the step that
// closes its last free neighbor, and sites never re-enter the boundary.
//
// Storage is a linear-probing table keyed by the packed coordinate word.
// Key 0 marks an empty slot (packed offsets start at 1, so no site maps to 0).
// A RangeState is owned by a single trial; distinct trials share nothing.

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "walklab/lattice.hpp"
#include "walklab/rng.hpp"
#include "walklab/walk.hpp"

namespace walklab {

struct SiteRecord {
  std::uint32_t visit_count = 0;
  std::uint8_t neighbors_in_range = 0;
};

struct VisitTimesPolicy {
  bool retain = false;
  std::uint32_t max_per_site = 0;  // keep only the first max_per_site visit times
};

class RangeState {
 public:
  explicit RangeState(int d, VisitTimesPolicy times = {}, std::size_t initial_capacity = 1u << 10)
      : d_(d), packing_(d), times_policy_(times) {
    check_dimension(d);
    std::size_t cap = 64;
    while (cap < initial_capacity) cap <<= 1;
    init_table(cap);
    // R(0) = {0}: the origin is visited once and is a boundary point
    current_ = origin();
    current_key_ = packing_.pack(current_);
    const std::size_t slot = insert_new(current_key_);
    visits_[slot] = 1;
    nbrs_[slot] = 0;
    record_visit_time(slot, 0);
    boundary_count_ = 1;
    step_index_ = 0;
    site_count_ = 1;
  }

  int dimension() const { return d_; }
  std::uint64_t step_index() const { return step_index_; }
  std::uint64_t range_size() const { return site_count_; }
  std::uint64_t boundary_count() const { return boundary_count_; }
  const LatticePoint& current() const { return current_; }
  const SitePacking& packing() const { return packing_; }

  // Advance to an adjacent lattice point. Rejects non-neighbors.
  void advance(const LatticePoint& next) {
    if (l1_distance(next, current_, d_) != 1)
      throw std::invalid_argument("advance: next position is not adjacent to the current one");
    advance_unchecked(next);
  }

  // Advance along a canonical direction (hot path: adjacency holds by construction).
  void advance_dir(int dir) { advance_unchecked(neighbor(current_, dir)); }

  bool contains(const LatticePoint& x) const {
    if (!packing_.in_range(x)) return false;
    return find(packing_.pack(x)) != kNoSlot;
  }

  std::uint32_t visit_count(const LatticePoint& x) const {
    if (!packing_.in_range(x)) return 0;
    const std::size_t slot = find(packing_.pack(x));
    return slot == kNoSlot ? 0 : visits_[slot];
  }

  std::uint8_t neighbors_in_range(const LatticePoint& x) const {
    const std::size_t slot = find(packing_.pack(x));
    return slot == kNoSlot ? 0 : nbrs_[slot];
  }

  // x is an inner-boundary point iff it is in the range and has a neighbor outside.
  bool is_inner_boundary(const LatticePoint& x) const {
    if (!packing_.in_range(x)) return false;
    const std::size_t slot = find(packing_.pack(x));
    return slot != kNoSlot && nbrs_[slot] < 2 * d_;
  }

  // x is in the directional boundary for unit direction b iff x is in the
  // range and x+b is not.
  bool is_directional_boundary(const LatticePoint& x, int dir_b) const {
    if (dir_b < 0 || dir_b >= 2 * d_)
      throw std::invalid_argument("is_directional_boundary: bad direction index");
    if (!packing_.in_range(x)) return false;
    const std::size_t slot = find(packing_.pack(x));
    if (slot == kNoSlot) return false;
    return find(packing_.neighbor_key(packing_.pack(x), dir_b)) == kNoSlot;
  }

  const std::vector<std::uint64_t>* visit_times(const LatticePoint& x) const {
    if (!times_policy_.retain) return nullptr;
    const std::size_t slot = find(packing_.pack(x));
    if (slot == kNoSlot || times_idx_[slot] == kNoTimes) return nullptr;
    return &times_store_[times_idx_[slot]];
  }

  bool retains_visit_times() const { return times_policy_.retain; }

  template <typename Fn>  // fn(packed_key, visit_count, neighbors_in_range)
  void for_each_site(Fn&& fn) const {
    for (std::size_t i = 0; i < keys_.size(); ++i)
      if (keys_[i] != 0) fn(keys_[i], visits_[i], nbrs_[i]);
  }

  // Slow-path audit: recount the boundary from scratch.
  std::uint64_t audit_recount_boundary() const {
    std::uint64_t count = 0;
    for (std::size_t i = 0; i < keys_.size(); ++i)
      if (keys_[i] != 0 && nbrs_[i] < 2 * d_) ++count;
    return count;
  }

  // Debug dump: "x1 x2 [x3 ...] visit_count neighbors_in_range is_boundary",
  // sorted lexicographically by coordinates.
  void dump(std::ostream& os) const {
    struct Row {
      LatticePoint p;
      std::uint32_t visits;
      std::uint8_t nbrs;
    };
    std::vector<Row> rows;
    rows.reserve(site_count_);
    for (std::size_t i = 0; i < keys_.size(); ++i)
      if (keys_[i] != 0) rows.push_back({packing_.unpack(keys_[i]), visits_[i], nbrs_[i]});
    std::sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
      for (int i = 0; i < d_; ++i)
        if (a.p[i] != b.p[i]) return a.p[i] < b.p[i];
      return false;
    });
    for (const Row& r : rows) {
      for (int i = 0; i < d_; ++i) os << r.p[i] << ' ';
      os << r.visits << ' ' << int(r.nbrs) << ' ' << (r.nbrs < 2 * d_ ? 1 : 0) << '\n';
    }
  }

 private:
  static constexpr std::size_t kNoSlot = static_cast<std::size_t>(-1);
  static constexpr std::uint32_t kNoTimes = 0xffffffffu;

  void advance_unchecked(const LatticePoint& next) {
    const int moved_axis = [&] {
      for (int i = 0; i < d_; ++i)
        if (next[i] != current_[i]) return i;
      return 0;
    }();
    if (next[moved_axis] < -packing_.max_abs || next[moved_axis] > packing_.max_abs)
      throw std::overflow_error("walk left the packable coordinate range");
    const std::uint64_t key =
        next[moved_axis] > current_[moved_axis]
            ? current_key_ + packing_.stride[static_cast<std::size_t>(moved_axis)]
            : current_key_ - packing_.stride[static_cast<std::size_t>(moved_axis)];

    ++step_index_;
    std::size_t slot = find(key);
    if (slot != kNoSlot) {
      ++visits_[slot];
      record_visit_time(slot, step_index_);
    } else {
      maybe_grow();
      slot = insert_new(key);
      visits_[slot] = 1;
      record_visit_time(slot, step_index_);
      ++site_count_;
      const int full = 2 * d_;
      int in_range = 0;
      for (int dir = 0; dir < full; ++dir) {
        const std::size_t nslot = find(packing_.neighbor_key(key, dir));
        if (nslot == kNoSlot) continue;
        ++in_range;
        if (++nbrs_[nslot] == full) --boundary_count_;  // neighbor became interior
      }
      nbrs_[slot] = static_cast<std::uint8_t>(in_range);
      if (in_range < full) ++boundary_count_;
    }
    current_ = next;
    current_key_ = key;
  }

  void record_visit_time(std::size_t slot, std::uint64_t t) {
    if (!times_policy_.retain) return;
    if (times_idx_[slot] == kNoTimes) {
      times_idx_[slot] = static_cast<std::uint32_t>(times_store_.size());
      times_store_.emplace_back();
    }
    auto& ts = times_store_[times_idx_[slot]];
    if (ts.size() < times_policy_.max_per_site) ts.push_back(t);
  }

  void init_table(std::size_t cap) {
    keys_.assign(cap, 0);
    visits_.assign(cap, 0);
    nbrs_.assign(cap, 0);
    if (times_policy_.retain) times_idx_.assign(cap, kNoTimes);
    mask_ = cap - 1;
  }

  std::size_t find(std::uint64_t key) const {
    std::size_t i = mix64(key) & mask_;
    while (keys_[i] != 0) {
      if (keys_[i] == key) return i;
      i = (i + 1) & mask_;
    }
    return kNoSlot;
  }

  std::size_t insert_new(std::uint64_t key) {
    std::size_t i = mix64(key) & mask_;
    while (keys_[i] != 0) i = (i + 1) & mask_;
    keys_[i] = key;
    return i;
  }

  void maybe_grow() {
    if ((site_count_ + 1) * 2 < keys_.size()) return;
    std::vector<std::uint64_t> old_keys(std::move(keys_));
    std::vector<std::uint32_t> old_visits(std::move(visits_));
    std::vector<std::uint8_t> old_nbrs(std::move(nbrs_));
    std::vector<std::uint32_t> old_times(std::move(times_idx_));
    init_table(old_keys.size() * 2);
    for (std::size_t i = 0; i < old_keys.size(); ++i) {
      if (old_keys[i] == 0) continue;
      const std::size_t slot = insert_new(old_keys[i]);
      visits_[slot] = old_visits[i];
      nbrs_[slot] = old_nbrs[i];
      if (times_policy_.retain) times_idx_[slot] = old_times[i];
    }
  }

  int d_;
  SitePacking packing_;
  VisitTimesPolicy times_policy_;

  std::vector<std::uint64_t> keys_;
  std::vector<std::uint32_t> visits_;
  std::vector<std::uint8_t> nbrs_;
  std::vector<std::uint32_t> times_idx_;
  std::vector<std::vector<std::uint64_t>> times_store_;
  std::size_t mask_ = 0;

  LatticePoint current_{};
  std::uint64_t current_key_ = 0;
  std::uint64_t step_index_ = 0;
  std::uint64_t site_count_ = 0;
  std::uint64_t boundary_count_ = 0;
};

inline RangeState new_state(int d, VisitTimesPolicy times = {}) { return RangeState(d, times); }

// From-scratch construction of the interval range R[l,n] = {S_l, ..., S_n}.
// Deliberately independent of the incremental path: builds the visited set,
// then probes every neighbor of every site.  R[l,n] with l > n is the empty
// range.  Used as the oracle for advance() and for nesting checks.
struct ScratchRange {
  int d = 2;
  bool empty = true;
  std::uint64_t step_index = 0;
  std::uint64_t boundary_count = 0;
  // sorted by key
  std::vector<std::uint64_t> keys;
  std::vector<std::uint32_t> visits;
  std::vector<std::uint8_t> nbrs;

  bool contains(std::uint64_t key) const {
    return std::binary_search(keys.begin(), keys.end(), key);
  }
  std::size_t index_of(std::uint64_t key) const {
    const auto it = std::lower_bound(keys.begin(), keys.end(), key);
    if (it == keys.end() || *it != key) return static_cast<std::size_t>(-1);
    return static_cast<std::size_t>(it - keys.begin());
  }
  bool is_inner_boundary(std::uint64_t key) const {
    const std::size_t i = index_of(key);
    return i != static_cast<std::size_t>(-1) && nbrs[i] < 2 * d;
  }
  bool is_directional_boundary(const SitePacking& packing, std::uint64_t key, int dir_b) const {
    return contains(key) && !contains(packing.neighbor_key(key, dir_b));
  }
};

inline ScratchRange recompute_from_scratch(const WalkPath& path, std::uint64_t l, std::uint64_t n) {
  ScratchRange r;
  r.d = path.d;
  if (l > n) return r;  // empty range by convention
  if (n > path.steps()) throw std::invalid_argument("recompute_from_scratch: n beyond path end");
  const SitePacking packing(path.d);
  std::vector<std::uint64_t> seq;
  seq.reserve(n - l + 1);
  for (std::uint64_t t = l; t <= n; ++t) seq.push_back(packing.pack(path.points[t]));

  std::vector<std::uint64_t> sorted = seq;
  std::sort(sorted.begin(), sorted.end());
  r.keys.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    if (i == 0 || sorted[i] != sorted[i - 1]) r.keys.push_back(sorted[i]);
  r.visits.assign(r.keys.size(), 0);
  for (std::uint64_t key : seq) ++r.visits[r.index_of(key)];

  r.nbrs.assign(r.keys.size(), 0);
  for (std::size_t i = 0; i < r.keys.size(); ++i) {
    int in_range = 0;
    for (int dir = 0; dir < 2 * path.d; ++dir)
      if (r.contains(packing.neighbor_key(r.keys[i], dir))) ++in_range;
    r.nbrs[i] = static_cast<std::uint8_t>(in_range);
    if (in_range < 2 * path.d) ++r.boundary_count;
  }
  r.empty = false;
  r.step_index = n - l;
  return r;
}

// Exact structural comparison between the incremental state and a from-scratch
// rebuild of R[0,n]: same sites, visit counts, neighbor counts, boundary size.
inline bool states_agree(const RangeState& state, const ScratchRange& scratch) {
  if (scratch.empty) return false;
  if (state.range_size() != scratch.keys.size()) return false;
  if (state.step_index() != scratch.step_index) return false;
  if (state.boundary_count() != scratch.boundary_count) return false;
  bool ok = true;
  std::size_t seen = 0;
  state.for_each_site([&](std::uint64_t key, std::uint32_t visits, std::uint8_t nbrs) {
    const std::size_t i = scratch.index_of(key);
    if (i == static_cast<std::size_t>(-1) || scratch.visits[i] != visits ||
        scratch.nbrs[i] != nbrs)
      ok = false;
    ++seen;
  });
  return ok && seen == scratch.keys.size();
}

}  // namespace walklab
