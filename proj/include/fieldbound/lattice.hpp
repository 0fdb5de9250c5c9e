#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace fieldbound {

// A point of the integer lattice Z^d. Ordering is lexicographic on coordinates.
struct SitePoint {
  std::vector<int32_t> coords;

  SitePoint() = default;
  SitePoint(std::initializer_list<int32_t> c) : coords(c) {}
  explicit SitePoint(std::vector<int32_t> c) : coords(std::move(c)) {}

  int dim() const { return static_cast<int>(coords.size()); }
  int32_t operator[](int k) const { return coords[static_cast<size_t>(k)]; }

  friend bool operator==(const SitePoint&, const SitePoint&) = default;
  friend auto operator<=>(const SitePoint&, const SitePoint&) = default;
};

SitePoint operator+(const SitePoint& a, const SitePoint& b);
SitePoint operator-(const SitePoint& a, const SitePoint& b);

// Chebyshev (sup-norm) distance.
int32_t chebyshev(const SitePoint& a, const SitePoint& b);

std::string to_string(const SitePoint& p);

// Finite subset of Z^d. Points are kept sorted lexicographically and deduplicated,
// so sets compare with == and sites have a stable index. All points must share one
// dimension; the empty set has dimension 0.
class SiteSet {
 public:
  SiteSet() = default;
  explicit SiteSet(std::vector<SitePoint> pts);

  // Axis-aligned box given inclusive per-axis extents {lo, hi}.
  static SiteSet box(const std::vector<std::pair<int32_t, int32_t>>& extents);
  // d=1 interval {lo, ..., hi}.
  static SiteSet line(int32_t lo, int32_t hi);

  size_t size() const { return pts_.size(); }
  bool empty() const { return pts_.empty(); }
  int dim() const { return dim_; }

  const SitePoint& operator[](size_t i) const { return pts_[i]; }
  std::vector<SitePoint>::const_iterator begin() const { return pts_.begin(); }
  std::vector<SitePoint>::const_iterator end() const { return pts_.end(); }
  const std::vector<SitePoint>& points() const { return pts_; }

  bool contains(const SitePoint& p) const;
  // Position of p in lexicographic order, or -1 if absent.
  std::ptrdiff_t index_of(const SitePoint& p) const;

  friend bool operator==(const SiteSet&, const SiteSet&) = default;

 private:
  std::vector<SitePoint> pts_;
  int dim_ = 0;
};

std::string to_string(const SiteSet& s);

// One corner eps of {0,1}^d together with its parity |eps|.
struct Corner {
  std::vector<uint8_t> eps;
  int parity = 0;
};

// All 2^d corners in lexicographic order: (0,..,0), (0,..,1), ..., (1,..,1).
std::vector<Corner> corners(int d);

// The block {0..m}^d.
SiteSet base_block(int d, int m);

// B_t = t + {0..m}^d.
SiteSet block_at(const SitePoint& t, int m);

// B_t intersected with B_{t+eps}; empty when m = 0 and eps != 0.
// Cardinality is prod_k (m + 1 - eps_k).
SiteSet eps_block(const SitePoint& t, const Corner& eps, int m);

// Minkowski sum: {s + o : s in set, o in offsets}.
SiteSet dilate(const SiteSet& set, const SiteSet& offsets);

// lambda dilated by the block: union of B_t over t in lambda.
SiteSet window(const SiteSet& lambda, int m);

// Sites outside lambda whose block shadow meets lambda, plus sites of lambda
// reachable from the complement through a block face. Every boundary point is
// within Chebyshev distance m of both lambda and its complement.
SiteSet boundary(const SiteSet& lambda, int m);
SiteSet boundary_outer(const SiteSet& lambda, int m);
SiteSet boundary_inner(const SiteSet& lambda, int m);

// Ordered pairs (s, t) of distinct sites of lambda with chebyshev(s, t) > m.
void for_each_far_pair(const SiteSet& lambda, int m,
                       const std::function<void(const SitePoint&, const SitePoint&)>& fn);
std::vector<std::pair<SitePoint, SitePoint>> far_pairs(const SiteSet& lambda, int m);
uint64_t far_pair_count(const SiteSet& lambda, int m);

}  // namespace fieldbound
