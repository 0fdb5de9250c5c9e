#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fieldbound/errors.hpp"
#include "fieldbound/estimate.hpp"
#include "fieldbound/events.hpp"
#include "fieldbound/lattice.hpp"

namespace fieldbound {

// Absolute slack absorbing float roundoff in exact-backend comparisons.
inline constexpr double kExactTolerance = 1e-12;

// Scaling constants of the block bound:
//   c1(d, m) = 2^d ((m+1)^d - 1)       multiplies the boundary cover mass,
//   c2(d, m) = (1 + 2^d (2m+1)^d) / 2  multiplies the ordered far-pair mass.
std::pair<double, double> constants(int d, int m);

enum class Verdict { Holds, HoldsWithinCi, Violated };
const char* to_string(Verdict v);

struct BoundReport {
  int d = 0;
  int m = 0;
  uint64_t lambda_size = 0;
  std::string family;
  std::string model;
  std::string backend;
  uint64_t n = 0;  // outcomes or samples
  uint64_t seed = 0;
  double confidence = 0.0;  // 0 for exact
  bool exact_backend = true;

  ProbEstimate target;   // P(aggregate over lambda in U)
  MeanEstimate approx;   // E[sum over t of delta_t]
  double error = 0.0;
  double error_half_width = 0.0;

  double c1 = 0.0, c2 = 0.0;
  MeanEstimate boundary_sum;  // E[# covered boundary sites]
  MeanEstimate pair_sum;      // E[# ordered covered far pairs]
  double boundary_term = 0.0, boundary_half_width = 0.0;
  double pair_term = 0.0, pair_half_width = 0.0;
  uint64_t boundary_size = 0;
  uint64_t far_pair_count = 0;

  double bound = 0.0, bound_half_width = 0.0;
  double slack = 0.0;  // bound - error
  Verdict verdict = Verdict::Violated;

  bool pointwise_ran = false;
  uint64_t pointwise_checked = 0;
  uint64_t pointwise_violations = 0;
};

namespace detail {

// Index resolution of one bound instance against an estimator window.
struct BoundLayout {
  int d = 0, m = 0;
  double c1 = 0.0, c2 = 0.0;
  std::vector<int32_t> lambda_idx;
  struct Span {
    int32_t begin = 0, end = 0;
    int8_t sign = 1;
  };
  std::vector<Span> spans;         // lambda.size() * 2^d corner blocks
  std::vector<int32_t> block_idx;  // concatenated corner-block indices
  std::vector<int32_t> boundary_idx;
  // positions (in lambda order) within Chebyshev distance m, self excluded
  std::vector<int32_t> near_off, near_idx;
  uint64_t far_pairs_total = 0;
  uint64_t boundary_size = 0;
};

BoundLayout resolve_bound(const SiteSet& lambda, int m, const SiteSet& win);

// Per-outcome quantities of the bound.
struct PointwiseTerms {
  int64_t target = 0;  // indicator
  int64_t delta_sum = 0;
  int64_t boundary_covered = 0;
  int64_t far_covered_pairs = 0;  // ordered
  bool holds = false;
};

template <class T, class Family>
PointwiseTerms eval_pointwise(const BoundLayout& L, const Family& fam, const T* v,
                              std::vector<uint8_t>& covered_mask,
                              std::vector<int32_t>& covered_list) {
  PointwiseTerms r;
  r.target = fam.member_idx(v, L.lambda_idx.data(), L.lambda_idx.size()) ? 1 : 0;

  int64_t dsum = 0;
  for (const auto& sp : L.spans) {
    const bool in = fam.member_idx(v, L.block_idx.data() + sp.begin,
                                   static_cast<size_t>(sp.end - sp.begin));
    dsum += in ? sp.sign : 0;
  }
  r.delta_sum = dsum;

  int64_t bcov = 0;
  for (int32_t i : L.boundary_idx) bcov += fam.covered_idx(v, i) ? 1 : 0;
  r.boundary_covered = bcov;

  covered_list.clear();
  covered_mask.assign(L.lambda_idx.size(), 0);
  for (size_t pos = 0; pos < L.lambda_idx.size(); ++pos) {
    if (fam.covered_idx(v, L.lambda_idx[pos])) {
      covered_mask[pos] = 1;
      covered_list.push_back(static_cast<int32_t>(pos));
    }
  }
  const int64_t k = static_cast<int64_t>(covered_list.size());
  int64_t near_cov = 0;
  for (int32_t pos : covered_list)
    for (int32_t q = L.near_off[static_cast<size_t>(pos)];
         q < L.near_off[static_cast<size_t>(pos) + 1]; ++q)
      near_cov += covered_mask[static_cast<size_t>(L.near_idx[static_cast<size_t>(q)])];
  r.far_covered_pairs = k * (k - 1) - near_cov;

  // Integer/half-integer arithmetic is exact in doubles here, so compare
  // without slack.
  const double lhs = std::abs(static_cast<double>(r.target - r.delta_sum));
  const double rhs = L.c1 * static_cast<double>(r.boundary_covered) +
                     L.c2 * static_cast<double>(r.far_covered_pairs);
  r.holds = lhs <= rhs;
  return r;
}

template <class T, class Family>
struct VerifyAcc {
  const BoundLayout* L;
  const Family* fam;
  bool pointwise = false;
  Neumaier sum[4], sumsq[4];  // target, delta sum, boundary covered, far pairs
  uint64_t pw_checked = 0, pw_violations = 0;
  std::vector<uint8_t> covered_mask;
  std::vector<int32_t> covered_list;

  VerifyAcc(const BoundLayout* layout, const Family* family, bool pw)
      : L(layout), fam(family), pointwise(pw) {}

  void accumulate(const std::vector<T>& vals, double w) {
    const PointwiseTerms t = eval_pointwise(*L, *fam, vals.data(), covered_mask, covered_list);
    if (pointwise) {
      ++pw_checked;
      if (!t.holds) ++pw_violations;
    }
    const double f[4] = {static_cast<double>(t.target), static_cast<double>(t.delta_sum),
                         static_cast<double>(t.boundary_covered),
                         static_cast<double>(t.far_covered_pairs)};
    for (int i = 0; i < 4; ++i) {
      sum[i].add(w * f[i]);
      sumsq[i].add(w * f[i] * f[i]);
    }
  }

  void merge(const VerifyAcc& o) {
    for (int i = 0; i < 4; ++i) {
      sum[i].add(o.sum[i].get());
      sumsq[i].add(o.sumsq[i].get());
    }
    pw_checked += o.pw_checked;
    pw_violations += o.pw_violations;
  }
};

}  // namespace detail

// Pointwise corner-alternating increment at t:
//   delta_t = sum over corners eps of (-1)^|eps| I(aggregate over B_t^eps in U).
// Bounded by 2^(d-1) in absolute value; 0 when nothing is covered on
// B_t \ B_{t+1}.
template <class T, class Family>
int delta_pointwise(const Family& fam, const FieldSample<T>& s, const SitePoint& t, int m) {
  const int d = t.dim();
  int delta = 0;
  for (const auto& eps : corners(d)) {
    const SiteSet blk = eps_block(t, eps, m);
    const auto idx = detail::resolve_indices<T>(s.support, blk);
    const bool in = fam.member_idx(s.values.data(), idx.data(), idx.size());
    delta += in ? (eps.parity % 2 == 0 ? 1 : -1) : 0;
  }
  return delta;
}

// Mean of delta_t under the estimator's law, via the 2^d corner probabilities
// on a shared stream.
template <class T, class Family>
MeanEstimate delta_mean(const Family& fam, const Estimator<T>& est, const SitePoint& t, int m) {
  const int d = t.dim();
  std::vector<typename Estimator<T>::PredFn> preds;
  std::vector<int> signs;
  for (const auto& eps : corners(d)) {
    const SiteSet blk = eps_block(t, eps, m);
    auto idx = detail::resolve_indices<T>(est.window(), blk);
    preds.push_back([&fam, idx](const FieldSample<T>& s) {
      return fam.member_idx(s.values.data(), idx.data(), idx.size());
    });
    signs.push_back(eps.parity % 2 == 0 ? 1 : -1);
  }
  const auto probs = est.joint_prob(preds);
  MeanEstimate out;
  out.n = est.draws();
  for (size_t i = 0; i < probs.size(); ++i) {
    out.point += signs[i] * probs[i].point;
    out.half_width += probs[i].half_width;
  }
  return out;
}

struct VerifyOptions {
  bool pointwise = false;
};

// Full bound check: target, block approximation, boundary and far-pair terms,
// verdict. One pass over the estimator's stream.
template <class T, class Family>
BoundReport verify(const Family& fam, const SiteSet& lambda, int m, const Estimator<T>& est,
                   VerifyOptions opts = {}) {
  const detail::BoundLayout L = detail::resolve_bound(lambda, m, est.window());
  auto acc = est.reduce(detail::VerifyAcc<T, Family>(&L, &fam, opts.pointwise));

  BoundReport r;
  r.d = L.d;
  r.m = m;
  r.lambda_size = lambda.size();
  r.family = fam.name();
  r.model = est.model_description();
  r.backend = est.describe();
  r.n = est.draws();
  r.seed = est.seed();
  r.confidence = est.is_exact() ? 0.0 : est.confidence();
  r.exact_backend = est.is_exact();
  r.c1 = L.c1;
  r.c2 = L.c2;
  r.boundary_size = L.boundary_size;
  r.far_pair_count = L.far_pairs_total;

  const MeanEstimate target = est.finalize_slot(acc.sum[0], acc.sumsq[0]);
  r.target = ProbEstimate{target.point, target.half_width, target.n};
  if (!est.is_exact()) {
    const auto count = static_cast<uint64_t>(std::llround(acc.sum[0].get()));
    if (count == 0 || count == est.draws())
      r.target.half_width = std::max(r.target.half_width, 3.0 / static_cast<double>(est.draws()));
  }
  r.approx = est.finalize_slot(acc.sum[1], acc.sumsq[1]);
  r.boundary_sum = est.finalize_slot(acc.sum[2], acc.sumsq[2]);
  r.pair_sum = est.finalize_slot(acc.sum[3], acc.sumsq[3]);

  r.error = std::abs(r.target.point - r.approx.point);
  r.error_half_width = r.target.half_width + r.approx.half_width;
  r.boundary_term = r.c1 * r.boundary_sum.point;
  r.boundary_half_width = r.c1 * r.boundary_sum.half_width;
  r.pair_term = r.c2 * r.pair_sum.point;
  r.pair_half_width = r.c2 * r.pair_sum.half_width;
  r.bound = r.boundary_term + r.pair_term;
  r.bound_half_width = r.boundary_half_width + r.pair_half_width;
  r.slack = r.bound - r.error;

  if (est.is_exact())
    r.verdict = r.error <= r.bound + kExactTolerance ? Verdict::Holds : Verdict::Violated;
  else
    r.verdict = std::max(0.0, r.error - r.error_half_width) <= r.bound + r.bound_half_width
                    ? Verdict::HoldsWithinCi
                    : Verdict::Violated;

  r.pointwise_ran = opts.pointwise;
  r.pointwise_checked = acc.pw_checked;
  r.pointwise_violations = acc.pw_violations;
  return r;
}

// Sum-field entry: builds the sum family over the target and runs the general
// check. Kept as the canonical path for additive aggregates.
template <class T>
BoundReport verify_sum_field(TargetSet<T> target, const SiteSet& lambda, int m,
                             const Estimator<T>& est, VerifyOptions opts = {}, T zero = T{}) {
  const SumFamily<T> fam(std::move(target), std::move(zero));
  return verify(fam, lambda, m, est, opts);
}

// Same bound instance evaluated on a single sample; true when the pointwise
// inequality holds there.
template <class T, class Family>
bool verify_pointwise(const Family& fam, const SiteSet& lambda, int m, const FieldSample<T>& s) {
  const detail::BoundLayout L = detail::resolve_bound(lambda, m, s.support);
  std::vector<uint8_t> mask;
  std::vector<int32_t> list;
  return detail::eval_pointwise(L, fam, s.values.data(), mask, list).holds;
}

// E[sum over t in lambda of delta_t], one pass on the estimator's stream.
template <class T, class Family>
MeanEstimate approx_sum(const Family& fam, const SiteSet& lambda, int m,
                        const Estimator<T>& est) {
  const detail::BoundLayout L = detail::resolve_bound(lambda, m, est.window());
  auto acc = est.reduce(detail::VerifyAcc<T, Family>(&L, &fam, false));
  return est.finalize_slot(acc.sum[1], acc.sumsq[1]);
}

struct RhsTerms {
  double boundary_term = 0.0, boundary_half_width = 0.0;
  double pair_term = 0.0, pair_half_width = 0.0;
  double total() const { return boundary_term + pair_term; }
};

// The two scaled right-hand-side terms of the bound.
template <class T, class Family>
RhsTerms rhs_bound(const Family& fam, const SiteSet& lambda, int m, const Estimator<T>& est) {
  const detail::BoundLayout L = detail::resolve_bound(lambda, m, est.window());
  auto acc = est.reduce(detail::VerifyAcc<T, Family>(&L, &fam, false));
  const MeanEstimate b = est.finalize_slot(acc.sum[2], acc.sumsq[2]);
  const MeanEstimate p = est.finalize_slot(acc.sum[3], acc.sumsq[3]);
  return RhsTerms{L.c1 * b.point, L.c1 * b.half_width, L.c2 * p.point, L.c2 * p.half_width};
}

// d=1 specialization of the bound for sum fields on {1..n}:
//   |P(S_n in U) - n (P(S_{m+1} in U) - P(S_m in U))|
//     <= 2 m P(Z_1 != 0) + 2 sum_{j - i > m} P(Z_i != 0, Z_j != 0).
// Assumes a translation-invariant model; the estimator window must cover
// {1 .. max(n, m+1)}.
struct Theorem1Report {
  int n = 0, m = 0;
  ProbEstimate target;            // P(S_{1..n} in U)
  ProbEstimate block_long;        // P(S_{1..m+1} in U)
  ProbEstimate block_short;       // P(S_{1..m} in U)
  double approx = 0.0, approx_half_width = 0.0;
  double error = 0.0, error_half_width = 0.0;
  MeanEstimate cluster;           // P(Z_1 != 0)
  MeanEstimate pair_sum;          // E[# unordered covered far pairs]
  double bound = 0.0, bound_half_width = 0.0;
  Verdict verdict = Verdict::Violated;
};

namespace detail {

template <class T>
struct Theorem1Acc {
  const std::vector<TargetSet<T>>* targets;
  std::vector<int32_t> site_idx;  // {1 .. max(n, m+1)} resolved, ascending
  size_t n_sites = 0;             // lambda = first n positions
  int m = 0;
  T zero;
  // slots: per target (S_n, S_{m+1}, S_m) then cluster, pairs
  std::vector<Neumaier> sum, sumsq;
  std::vector<int32_t> covered;

  Theorem1Acc(const std::vector<TargetSet<T>>* ts, std::vector<int32_t> idx, size_t n_, int m_,
              T z)
      : targets(ts), site_idx(std::move(idx)), n_sites(n_), m(m_), zero(std::move(z)),
        sum(3 * ts->size() + 2), sumsq(3 * ts->size() + 2) {}

  void accumulate(const std::vector<T>& vals, double w) {
    const T* v = vals.data();
    T s_n = zero;
    T s_short = zero;  // first m sites
    T s_long = zero;   // first m+1 sites
    covered.clear();
    for (size_t i = 0; i < site_idx.size(); ++i) {
      const T& x = v[site_idx[i]];
      if (i < n_sites) s_n = s_n + x;
      if (i < static_cast<size_t>(m)) s_short = s_short + x;
      if (i < static_cast<size_t>(m) + 1) s_long = s_long + x;
      if (i < n_sites && !(x == zero)) covered.push_back(static_cast<int32_t>(i));
    }
    // unordered covered pairs with gap > m, via two-pointer over sorted positions
    const int64_t k = static_cast<int64_t>(covered.size());
    int64_t near_pairs = 0;
    size_t lo = 0;
    for (size_t hi = 0; hi < covered.size(); ++hi) {
      while (covered[hi] - covered[lo] > m) ++lo;
      near_pairs += static_cast<int64_t>(hi - lo);
    }
    const int64_t far_pairs = k * (k - 1) / 2 - near_pairs;

    std::vector<double> f(sum.size());
    for (size_t t = 0; t < targets->size(); ++t) {
      const auto& U = (*targets)[t];
      f[3 * t + 0] = U.contains(s_n) ? 1.0 : 0.0;
      f[3 * t + 1] = U.contains(s_long) ? 1.0 : 0.0;
      f[3 * t + 2] = U.contains(s_short) ? 1.0 : 0.0;
    }
    f[sum.size() - 2] = covered.empty() || covered[0] != 0 ? 0.0 : 1.0;  // Z at site 1
    f[sum.size() - 1] = static_cast<double>(far_pairs);
    for (size_t i = 0; i < sum.size(); ++i) {
      sum[i].add(w * f[i]);
      sumsq[i].add(w * f[i] * f[i]);
    }
  }

  void merge(const Theorem1Acc& o) {
    for (size_t i = 0; i < sum.size(); ++i) {
      sum[i].add(o.sum[i].get());
      sumsq[i].add(o.sumsq[i].get());
    }
  }
};

template <class T>
ProbEstimate finalize_prob(const Estimator<T>& est, const Neumaier& s, const Neumaier& q) {
  const MeanEstimate m = est.finalize_slot(s, q);
  ProbEstimate p{m.point, m.half_width, m.n};
  if (!est.is_exact()) {
    const auto count = static_cast<uint64_t>(std::llround(s.get()));
    if (count == 0 || count == est.draws())
      p.half_width = std::max(p.half_width, 3.0 / static_cast<double>(est.draws()));
  }
  return p;
}

template <class T>
std::vector<Theorem1Report> theorem1_d1_multi(const std::vector<TargetSet<T>>& targets, int n,
                                              int m, const Estimator<T>& est, T zero) {
  if (n < 1) throw std::invalid_argument("theorem1: n must be >= 1");
  if (m < 0) throw std::invalid_argument("theorem1: m must be >= 0");
  if (est.window().dim() != 1) throw std::invalid_argument("theorem1 applies to d=1");
  for (const auto& U : targets)
    if (U.contains(zero))
      throw std::invalid_argument("theorem1: target must exclude the zero aggregate");
  const int need = std::max(n, m + 1);
  auto idx = resolve_indices<T>(est.window(), SiteSet::line(1, need));
  auto acc = est.reduce(
      Theorem1Acc<T>(&targets, std::move(idx), static_cast<size_t>(n), m, zero));

  std::vector<Theorem1Report> out;
  for (size_t t = 0; t < targets.size(); ++t) {
    Theorem1Report r;
    r.n = n;
    r.m = m;
    r.target = finalize_prob(est, acc.sum[3 * t + 0], acc.sumsq[3 * t + 0]);
    r.block_long = finalize_prob(est, acc.sum[3 * t + 1], acc.sumsq[3 * t + 1]);
    r.block_short = finalize_prob(est, acc.sum[3 * t + 2], acc.sumsq[3 * t + 2]);
    r.approx = n * (r.block_long.point - r.block_short.point);
    r.approx_half_width = n * (r.block_long.half_width + r.block_short.half_width);
    r.error = std::abs(r.target.point - r.approx);
    r.error_half_width = r.target.half_width + r.approx_half_width;
    r.cluster = est.finalize_slot(acc.sum[acc.sum.size() - 2], acc.sumsq[acc.sum.size() - 2]);
    r.pair_sum = est.finalize_slot(acc.sum[acc.sum.size() - 1], acc.sumsq[acc.sum.size() - 1]);
    r.bound = 2.0 * m * r.cluster.point + 2.0 * r.pair_sum.point;
    r.bound_half_width = 2.0 * m * r.cluster.half_width + 2.0 * r.pair_sum.half_width;
    if (est.is_exact())
      r.verdict = r.error <= r.bound + kExactTolerance ? Verdict::Holds : Verdict::Violated;
    else
      r.verdict = std::max(0.0, r.error - r.error_half_width) <= r.bound + r.bound_half_width
                      ? Verdict::HoldsWithinCi
                      : Verdict::Violated;
    out.push_back(r);
  }
  return out;
}

}  // namespace detail

template <class T>
Theorem1Report theorem1_d1(const SumFamily<T>& fam, int n, int m, const Estimator<T>& est) {
  std::vector<TargetSet<T>> targets = {fam.target()};
  return detail::theorem1_d1_multi<T>(targets, n, m, est, fam.zero())[0];
}

// Classical two-sided union bound on a finite event list:
//   0 <= sum P(A_i) - P(union A_i) <= sum_{i<j} P(A_i and A_j).
struct BonferroniReport {
  std::vector<ProbEstimate> event_probs;
  ProbEstimate union_prob;
  MeanEstimate gap;         // sum P(A_i) - P(union)
  MeanEstimate pair_bound;  // sum_{i<j} P(A_i and A_j)
  bool holds = false;
};

template <class T>
BonferroniReport classical_bonferroni(const std::vector<typename Estimator<T>::PredFn>& events,
                                      const Estimator<T>& est) {
  if (events.empty()) throw std::invalid_argument("bonferroni: no events");
  std::vector<typename Estimator<T>::SampleFn> fns;
  for (const auto& ev : events)
    fns.push_back([&ev](const FieldSample<T>& s) { return ev(s) ? 1.0 : 0.0; });
  fns.push_back([&events](const FieldSample<T>& s) {  // union
    for (const auto& ev : events)
      if (ev(s)) return 1.0;
    return 0.0;
  });
  fns.push_back([&events](const FieldSample<T>& s) {  // gap: count - union
    double c = 0.0;
    for (const auto& ev : events) c += ev(s) ? 1.0 : 0.0;
    return c - (c > 0.0 ? 1.0 : 0.0);
  });
  fns.push_back([&events](const FieldSample<T>& s) {  // pairwise intersections
    double c = 0.0;
    for (const auto& ev : events) c += ev(s) ? 1.0 : 0.0;
    return c * (c - 1.0) / 2.0;
  });
  const auto ms = est.joint_mean(fns);

  BonferroniReport r;
  for (size_t i = 0; i < events.size(); ++i)
    r.event_probs.push_back(ProbEstimate{ms[i].point, ms[i].half_width, ms[i].n});
  const auto& u = ms[events.size()];
  r.union_prob = ProbEstimate{u.point, u.half_width, u.n};
  r.gap = ms[events.size() + 1];
  r.pair_bound = ms[events.size() + 2];
  if (est.is_exact())
    r.holds = r.gap.point >= -kExactTolerance &&
              r.gap.point <= r.pair_bound.point + kExactTolerance;
  else
    r.holds = r.gap.point - r.gap.half_width <= r.pair_bound.point + r.pair_bound.half_width &&
              r.gap.point + r.gap.half_width >= 0.0;
  return r;
}

}  // namespace fieldbound
