#include "fieldbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace fieldbound {

std::pair<double, double> constants(int d, int m) {
  if (d < 1) throw std::invalid_argument("constants: d must be >= 1");
  if (m < 0) throw std::invalid_argument("constants: m must be >= 0");
  const double two_d = std::ldexp(1.0, std::min(d, 1024));
  double mp1_d = 1.0, tmp1_d = 1.0;
  for (int k = 0; k < d; ++k) {
    mp1_d *= m + 1.0;
    tmp1_d *= 2.0 * m + 1.0;
  }
  const double c1 = two_d * (mp1_d - 1.0);
  const double c2 = (1.0 + two_d * tmp1_d) / 2.0;
  // both constants must stay exactly representable (integer / half-integer)
  if (!(c2 < 9.007199254740992e15))
    throw std::invalid_argument("constants: d, m too large for exact arithmetic");
  return {c1, c2};
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds:
      return "holds";
    case Verdict::HoldsWithinCi:
      return "holds-within-CI";
    default:
      return "violated";
  }
}

namespace detail {

BoundLayout resolve_bound(const SiteSet& lambda, int m, const SiteSet& win) {
  if (lambda.empty()) throw std::invalid_argument("bound instance: lambda must be non-empty");
  if (m < 0) throw std::invalid_argument("bound instance: m must be >= 0");
  const int d = lambda.dim();
  if (win.dim() != d)
    throw SupportError("estimator window dimension " + std::to_string(win.dim()) +
                       " does not match lambda dimension " + std::to_string(d));

  BoundLayout L;
  L.d = d;
  L.m = m;
  std::tie(L.c1, L.c2) = constants(d, m);

  auto locate = [&win](const SitePoint& p) {
    const std::ptrdiff_t i = win.index_of(p);
    if (i < 0)
      throw SupportError("estimator window does not cover site " + fieldbound::to_string(p));
    return static_cast<int32_t>(i);
  };

  L.lambda_idx.reserve(lambda.size());
  for (const auto& t : lambda) L.lambda_idx.push_back(locate(t));

  const auto eps_list = corners(d);
  L.spans.reserve(lambda.size() * eps_list.size());
  for (const auto& t : lambda) {
    for (const auto& eps : eps_list) {
      BoundLayout::Span sp;
      sp.begin = static_cast<int32_t>(L.block_idx.size());
      for (const auto& p : eps_block(t, eps, m)) L.block_idx.push_back(locate(p));
      sp.end = static_cast<int32_t>(L.block_idx.size());
      sp.sign = eps.parity % 2 == 0 ? 1 : -1;
      L.spans.push_back(sp);
    }
  }

  const SiteSet bdry = boundary(lambda, m);
  L.boundary_idx.reserve(bdry.size());
  for (const auto& p : bdry) L.boundary_idx.push_back(locate(p));
  L.boundary_size = bdry.size();

  // near lists in lambda positions: Chebyshev distance <= m, self excluded
  const size_t n = lambda.size();
  L.near_off.assign(n + 1, 0);
  double ball = 1.0;
  for (int k = 0; k < d; ++k) ball *= 2.0 * m + 1.0;
  const bool probe = static_cast<double>(n) > 4.0 * ball * std::log2(static_cast<double>(n) + 2.0);
  if (!probe) {
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        if (chebyshev(lambda[i], lambda[j]) <= m)
          L.near_idx.push_back(static_cast<int32_t>(j));
      }
      L.near_off[i + 1] = static_cast<int32_t>(L.near_idx.size());
    }
  } else {
    std::vector<int32_t> off(static_cast<size_t>(d), -m);
    for (size_t i = 0; i < n; ++i) {
      std::fill(off.begin(), off.end(), -m);
      for (;;) {
        bool all_zero = true;
        for (int32_t o : off)
          if (o != 0) {
            all_zero = false;
            break;
          }
        if (!all_zero) {
          SitePoint q = lambda[i];
          for (int k = 0; k < d; ++k) q.coords[static_cast<size_t>(k)] += off[static_cast<size_t>(k)];
          const std::ptrdiff_t j = lambda.index_of(q);
          if (j >= 0) L.near_idx.push_back(static_cast<int32_t>(j));
        }
        int k = d - 1;
        while (k >= 0 && off[static_cast<size_t>(k)] == m) off[static_cast<size_t>(k--)] = -m;
        if (k < 0) break;
        ++off[static_cast<size_t>(k)];
      }
      L.near_off[i + 1] = static_cast<int32_t>(L.near_idx.size());
    }
  }

  L.far_pairs_total = far_pair_count(lambda, m);
  return L;
}

}  // namespace detail

}  // namespace fieldbound
