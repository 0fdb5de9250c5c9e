#include "fieldbound/lattice.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace fieldbound {

SitePoint operator+(const SitePoint& a, const SitePoint& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("site dimension mismatch");
  SitePoint r = a;
  for (int k = 0; k < a.dim(); ++k) r.coords[static_cast<size_t>(k)] += b[k];
  return r;
}

SitePoint operator-(const SitePoint& a, const SitePoint& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("site dimension mismatch");
  SitePoint r = a;
  for (int k = 0; k < a.dim(); ++k) r.coords[static_cast<size_t>(k)] -= b[k];
  return r;
}

int32_t chebyshev(const SitePoint& a, const SitePoint& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("site dimension mismatch");
  int32_t d = 0;
  for (int k = 0; k < a.dim(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

std::string to_string(const SitePoint& p) {
  std::string s = "(";
  for (int k = 0; k < p.dim(); ++k) {
    if (k) s += ",";
    s += std::to_string(p[k]);
  }
  s += ")";
  return s;
}

SiteSet::SiteSet(std::vector<SitePoint> pts) : pts_(std::move(pts)) {
  if (pts_.empty()) return;
  dim_ = pts_[0].dim();
  for (const auto& p : pts_)
    if (p.dim() != dim_) throw std::invalid_argument("site dimension mismatch in set");
  std::sort(pts_.begin(), pts_.end());
  pts_.erase(std::unique(pts_.begin(), pts_.end()), pts_.end());
}

SiteSet SiteSet::box(const std::vector<std::pair<int32_t, int32_t>>& extents) {
  if (extents.empty()) throw std::invalid_argument("box needs at least one axis");
  for (const auto& [lo, hi] : extents)
    if (lo > hi) throw std::invalid_argument("box extent with lo > hi");
  std::vector<SitePoint> pts;
  SitePoint cur;
  cur.coords.resize(extents.size());
  // Odometer over the box, lexicographic by construction.
  for (size_t k = 0; k < extents.size(); ++k) cur.coords[k] = extents[k].first;
  for (;;) {
    pts.push_back(cur);
    size_t k = extents.size();
    while (k > 0) {
      --k;
      if (cur.coords[k] < extents[k].second) {
        ++cur.coords[k];
        for (size_t j = k + 1; j < extents.size(); ++j) cur.coords[j] = extents[j].first;
        break;
      }
      if (k == 0) return SiteSet(std::move(pts));
    }
  }
}

SiteSet SiteSet::line(int32_t lo, int32_t hi) { return box({{lo, hi}}); }

bool SiteSet::contains(const SitePoint& p) const { return index_of(p) >= 0; }

std::ptrdiff_t SiteSet::index_of(const SitePoint& p) const {
  auto it = std::lower_bound(pts_.begin(), pts_.end(), p);
  if (it == pts_.end() || !(*it == p)) return -1;
  return it - pts_.begin();
}

std::string to_string(const SiteSet& s) {
  std::string r = "{";
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) r += ",";
    r += to_string(s[i]);
  }
  r += "}";
  return r;
}

std::vector<Corner> corners(int d) {
  if (d < 1 || d > 30) throw std::invalid_argument("corners: d out of range");
  std::vector<Corner> cs;
  cs.reserve(size_t{1} << d);
  for (uint32_t mask = 0; mask < (uint32_t{1} << d); ++mask) {
    Corner c;
    c.eps.resize(static_cast<size_t>(d));
    for (int k = 0; k < d; ++k) {
      uint8_t bit = static_cast<uint8_t>((mask >> (d - 1 - k)) & 1u);
      c.eps[static_cast<size_t>(k)] = bit;
      c.parity += bit;
    }
    cs.push_back(std::move(c));
  }
  return cs;
}

SiteSet base_block(int d, int m) {
  if (d < 1) throw std::invalid_argument("block: d must be >= 1");
  if (m < 0) throw std::invalid_argument("block: m must be >= 0");
  std::vector<std::pair<int32_t, int32_t>> ext(static_cast<size_t>(d), {0, m});
  return SiteSet::box(ext);
}

SiteSet block_at(const SitePoint& t, int m) {
  if (m < 0) throw std::invalid_argument("block: m must be >= 0");
  std::vector<std::pair<int32_t, int32_t>> ext;
  ext.reserve(static_cast<size_t>(t.dim()));
  for (int k = 0; k < t.dim(); ++k) ext.push_back({t[k], t[k] + m});
  return SiteSet::box(ext);
}

SiteSet eps_block(const SitePoint& t, const Corner& eps, int m) {
  if (m < 0) throw std::invalid_argument("block: m must be >= 0");
  if (static_cast<int>(eps.eps.size()) != t.dim())
    throw std::invalid_argument("eps dimension mismatch");
  // B_t cap B_{t+eps} = prod_k [t_k + eps_k, t_k + m].
  std::vector<std::pair<int32_t, int32_t>> ext;
  ext.reserve(static_cast<size_t>(t.dim()));
  for (int k = 0; k < t.dim(); ++k) {
    int32_t lo = t[k] + eps.eps[static_cast<size_t>(k)];
    int32_t hi = t[k] + m;
    if (lo > hi) return SiteSet();
    ext.push_back({lo, hi});
  }
  return SiteSet::box(ext);
}

SiteSet dilate(const SiteSet& set, const SiteSet& offsets) {
  if (set.empty() || offsets.empty()) return SiteSet();
  if (set.dim() != offsets.dim()) throw std::invalid_argument("dilate: dimension mismatch");
  std::vector<SitePoint> pts;
  pts.reserve(set.size() * offsets.size());
  for (const auto& t : set)
    for (const auto& o : offsets) pts.push_back(t + o);
  return SiteSet(std::move(pts));
}

SiteSet window(const SiteSet& lambda, int m) {
  if (m < 0) throw std::invalid_argument("window: m must be >= 0");
  if (lambda.empty()) return SiteSet();
  return dilate(lambda, base_block(lambda.dim(), m));
}

SiteSet boundary_outer(const SiteSet& lambda, int m) {
  const SiteSet w = window(lambda, m);
  std::vector<SitePoint> pts;
  for (const auto& s : w)
    if (!lambda.contains(s)) pts.push_back(s);
  return SiteSet(std::move(pts));
}

SiteSet boundary_inner(const SiteSet& lambda, int m) {
  if (m < 0) throw std::invalid_argument("boundary: m must be >= 0");
  if (lambda.empty()) return SiteSet();
  const int d = lambda.dim();
  // t lies in B_s \ B_{s+1} for s = t - delta exactly when delta is in {0..m}^d
  // with some zero coordinate, so scan those offsets for a complement witness.
  std::vector<SitePoint> offs;
  for (const auto& o : base_block(d, m)) {
    bool has_zero = false;
    for (int k = 0; k < d; ++k)
      if (o[k] == 0) { has_zero = true; break; }
    if (has_zero) offs.push_back(o);
  }
  std::vector<SitePoint> pts;
  for (const auto& t : lambda) {
    for (const auto& o : offs) {
      if (!lambda.contains(t - o)) {
        pts.push_back(t);
        break;
      }
    }
  }
  return SiteSet(std::move(pts));
}

SiteSet boundary(const SiteSet& lambda, int m) {
  SiteSet a = boundary_outer(lambda, m);
  SiteSet b = boundary_inner(lambda, m);
  std::vector<SitePoint> pts(a.begin(), a.end());
  pts.insert(pts.end(), b.begin(), b.end());
  return SiteSet(std::move(pts));
}

void for_each_far_pair(const SiteSet& lambda, int m,
                       const std::function<void(const SitePoint&, const SitePoint&)>& fn) {
  if (m < 0) throw std::invalid_argument("far pairs: m must be >= 0");
  for (size_t i = 0; i < lambda.size(); ++i)
    for (size_t j = 0; j < lambda.size(); ++j)
      if (i != j && chebyshev(lambda[i], lambda[j]) > m) fn(lambda[i], lambda[j]);
}

std::vector<std::pair<SitePoint, SitePoint>> far_pairs(const SiteSet& lambda, int m) {
  std::vector<std::pair<SitePoint, SitePoint>> out;
  for_each_far_pair(lambda, m, [&](const SitePoint& s, const SitePoint& t) {
    out.push_back({s, t});
  });
  return out;
}

uint64_t far_pair_count(const SiteSet& lambda, int m) {
  if (m < 0) throw std::invalid_argument("far pairs: m must be >= 0");
  const uint64_t n = lambda.size();
  if (n < 2) return 0;
  const int d = lambda.empty() ? 1 : lambda.dim();
  // Near pairs are cheaper to count through ball lookups once n is large.
  double ball = 1.0;
  for (int k = 0; k < d; ++k) ball *= 2.0 * m + 1.0;
  if (static_cast<double>(n) * static_cast<double>(n) <= static_cast<double>(n) * ball * 16.0) {
    uint64_t c = 0;
    for (size_t i = 0; i < lambda.size(); ++i)
      for (size_t j = 0; j < lambda.size(); ++j)
        if (i != j && chebyshev(lambda[i], lambda[j]) > m) ++c;
    return c;
  }
  std::vector<std::pair<int32_t, int32_t>> ext(static_cast<size_t>(d), {-m, m});
  const SiteSet ball_offs = SiteSet::box(ext);
  uint64_t near = 0;
  for (const auto& s : lambda) {
    for (const auto& o : ball_offs) {
      const SitePoint t = s + o;
      if (!(t == s) && lambda.contains(t)) ++near;
    }
  }
  return n * (n - 1) - near;
}

}  // namespace fieldbound
