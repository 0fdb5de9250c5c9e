// Acceptance gate: one line per criterion, exit code = number of failures.
// Tolerances and workloads are pinned here on purpose; do not tune them to
// make a line pass.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fieldbound/bounds.hpp"
#include "fieldbound/events.hpp"
#include "fieldbound/experiments.hpp"
#include "fieldbound/report.hpp"
#include "fieldbound/specs.hpp"

using namespace fieldbound;

namespace {

constexpr double kTol = 1e-12;

struct Line {
  bool pass = false;
  std::string text;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int prec = 3) {
  std::ostringstream os;
  os.precision(prec);
  os << std::fixed << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// 1. Exhaustive exact sweep: every (lambda, m, model, family) cell must hold
//    and pass the outcome-level inequality on 100% of enumerated outcomes.
//    Cells whose noise state space exceeds the pinned cap are skipped and
//    counted; everything else is enumerated in full.

Line criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr uint64_t kCap = uint64_t{1} << 21;

  const auto three_symbol =
      Marginal<double>::table({0.0, 1.0, 2.0}, {0.5, 0.3, 0.2});

  const auto models_for = [&](int d) {
    const auto unit =
        SiteSet::box(std::vector<std::pair<int32_t, int32_t>>(static_cast<size_t>(d), {0, 1}));
    return std::vector<FieldModel<double>>{
        FieldModel<double>::iid(Marginal<double>::bernoulli(0.2)),
        FieldModel<double>::iid(Marginal<double>::bernoulli(0.5)),
        FieldModel<double>::moving(Marginal<double>::bernoulli(0.4), unit, Combiner::AllOnes),
        FieldModel<double>::moving(three_symbol, unit, Combiner::Sum)};
  };

  const double inf = std::numeric_limits<double>::infinity();
  const auto families = [&]() {
    std::vector<AnyFamily<double>> fams;
    fams.emplace_back(SumFamily<double>(TargetSet<double>::interval(1.0, inf)));
    fams.emplace_back(SumFamily<double>(TargetSet<double>::points({2.0})));
    fams.emplace_back(UnionFamily<double>(TargetSet<double>::interval(1.0, inf)));
    fams.emplace_back(ProductFamily<double>(TargetSet<double>::interval(2.0, inf)));
    return fams;
  }();

  std::vector<SiteSet> lambdas;
  for (int len = 1; len <= 8; ++len) lambdas.push_back(SiteSet::line(0, len - 1));
  for (const auto& [a, b] : std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {1, 3},
                                                             {2, 2}, {2, 3}, {3, 3}})
    lambdas.push_back(SiteSet::box({{0, a - 1}, {0, b - 1}}));
  lambdas.push_back(SiteSet({SitePoint{0, 0}, SitePoint{1, 0}, SitePoint{2, 0},
                             SitePoint{0, 1}, SitePoint{0, 2}}));  // non-convex L

  uint64_t ran = 0, skipped = 0, failures = 0;
  std::string first_failure;
  for (const auto& lambda : lambdas) {
    for (int m = 0; m <= 1; ++m) {
      for (const auto& model : models_for(lambda.dim())) {
        std::optional<Estimator<double>> est;
        try {
          ExactOptions opt;
          opt.cap = kCap;
          est.emplace(Estimator<double>::exact(model, window(lambda, m), opt));
        } catch (const EnumerationCapError&) {
          skipped += families.size();
          continue;
        }
        for (const auto& fam : families) {
          const auto r = verify(fam, lambda, m, *est, VerifyOptions{true});
          ++ran;
          const bool ok = r.verdict == Verdict::Holds && r.pointwise_ran &&
                          r.pointwise_violations == 0;
          if (!ok) {
            ++failures;
            if (first_failure.empty())
              first_failure = fam.name() + " on " + model.describe() + " |lambda|=" +
                              std::to_string(lambda.size()) + " m=" + std::to_string(m);
          }
        }
      }
    }
  }

  const double dt = seconds_since(t0);
  Line out;
  out.pass = failures == 0 && ran > 200 && dt < 120.0;
  out.text = "exhaustive sweep: " + std::to_string(ran) + " cells hold with clean pointwise, " +
             std::to_string(skipped) + " skipped over the " + std::to_string(kCap) +
             "-outcome cap (" + fmt(dt, 1) + "s)";
  if (failures > 0)
    out.text = "exhaustive sweep: " + std::to_string(failures) + " of " + std::to_string(ran) +
               " cells failed, first: " + first_failure;
  else if (dt >= 120.0)
    out.text += " [over the 120s budget]";
  return out;
}

// ---------------------------------------------------------------------------
// 2. Increment contract on random samples: |delta_t| <= 2^(d-1), and delta_t
//    vanishes whenever the cover is false everywhere on B_t \ B_{t+1}.

struct DeltaCounters {
  uint64_t checked = 0, vanish_seen = 0, violations = 0;
};

template <class Family>
void delta_contract(const FieldModel<double>& model, const SiteSet& win, const Family& fam,
                    int m, int d, uint64_t seed, uint64_t n_samples, DeltaCounters& c) {
  const int cap = 1 << (d - 1);
  std::vector<SitePoint> anchors;
  for (const auto& p : win) {
    SitePoint corner = p;
    for (auto& coord : corner.coords) coord += static_cast<int32_t>(m);
    if (win.contains(corner)) anchors.push_back(p);  // windows here are boxes
  }
  SitePoint ones;
  ones.coords.assign(static_cast<size_t>(d), 1);
  for (uint64_t i = 0; i < n_samples; ++i) {
    const auto s = sample(model, win, seed, i);
    for (const auto& t : anchors) {
      const int delta = delta_pointwise(fam, s, t, m);
      ++c.checked;
      if (std::abs(delta) > cap) ++c.violations;
      bool covered_in_diff = false;
      const SiteSet bt = block_at(t, m);
      const SiteSet btn = block_at(t + ones, m);
      for (const auto& q : bt)
        if (btn.index_of(q) < 0 && fam.covered(s, q)) covered_in_diff = true;
      if (!covered_in_diff) {
        ++c.vanish_seen;
        if (delta != 0) ++c.violations;
      }
    }
  }
}

Line criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  const double inf = std::numeric_limits<double>::infinity();
  const auto three_symbol = Marginal<double>::table({0.0, 1.0, 2.0}, {0.5, 0.3, 0.2});
  DeltaCounters c;

  const SumFamily<double> sum1(TargetSet<double>::interval(1.0, inf));
  const SumFamily<double> sum2(TargetSet<double>::points({2.0}));
  const UnionFamily<double> uni(TargetSet<double>::interval(1.0, inf));
  const ProductFamily<double> prod(TargetSet<double>::interval(2.0, inf));

  // d = 1: moving 3-symbol sums, m in {0, 1, 2}.
  const auto m1 = FieldModel<double>::moving(three_symbol, SiteSet::line(0, 1), Combiner::Sum);
  for (int m = 0; m <= 2; ++m) {
    delta_contract(m1, SiteSet::line(0, 9), sum1, m, 1, 11 + static_cast<uint64_t>(m), 5000, c);
    delta_contract(m1, SiteSet::line(0, 9), sum2, m, 1, 21 + static_cast<uint64_t>(m), 5000, c);
  }
  // d = 2: iid Bernoulli and 3-symbol moving sums at m = 1.
  const auto m2a = FieldModel<double>::iid(Marginal<double>::bernoulli(0.35));
  const auto m2b =
      FieldModel<double>::moving(three_symbol, SiteSet::box({{0, 1}, {0, 1}}), Combiner::Sum);
  delta_contract(m2a, SiteSet::box({{0, 3}, {0, 3}}), uni, 1, 2, 31, 1500, c);
  delta_contract(m2b, SiteSet::box({{0, 3}, {0, 3}}), prod, 1, 2, 32, 1500, c);
  delta_contract(m2b, SiteSet::box({{0, 3}, {0, 3}}), sum1, 1, 2, 33, 1500, c);
  // d = 3: 1-dependent all-ones indicators at m = 1.
  const auto m3 = FieldModel<double>::moving(Marginal<double>::bernoulli(0.35),
                                             SiteSet::box({{0, 1}, {0, 1}, {0, 1}}),
                                             Combiner::AllOnes);
  delta_contract(m3, SiteSet::box({{0, 2}, {0, 2}, {0, 2}}), sum1, 1, 3, 41, 1300, c);

  const double dt = seconds_since(t0);
  Line out;
  out.pass = c.violations == 0 && c.checked >= 100000 && c.vanish_seen > 1000;
  out.text = "increment contract: " + std::to_string(c.checked) + " increments, " +
             std::to_string(c.vanish_seen) + " vanishing cases, " +
             std::to_string(c.violations) + " violations (" + fmt(dt, 1) + "s)";
  return out;
}

// ---------------------------------------------------------------------------
// 3. Exact-backend identities at 1e-12: probability route for the mean
//    increment vs enumeration of the pointwise one; d=1 block-difference
//    bridge; wrapped and unwrapped sum-family paths bit-identical.

bool reports_identical(const BoundReport& a, const BoundReport& b) {
  return a.target.point == b.target.point && a.target.half_width == b.target.half_width &&
         a.approx.point == b.approx.point && a.approx.half_width == b.approx.half_width &&
         a.error == b.error && a.error_half_width == b.error_half_width && a.c1 == b.c1 &&
         a.c2 == b.c2 && a.boundary_sum.point == b.boundary_sum.point &&
         a.pair_sum.point == b.pair_sum.point && a.boundary_term == b.boundary_term &&
         a.pair_term == b.pair_term && a.bound == b.bound &&
         a.bound_half_width == b.bound_half_width && a.slack == b.slack &&
         a.verdict == b.verdict && a.boundary_size == b.boundary_size &&
         a.far_pair_count == b.far_pair_count;
}

Line criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  const double inf = std::numeric_limits<double>::infinity();
  const auto three_symbol = Marginal<double>::table({0.0, 1.0, 2.0}, {0.5, 0.3, 0.2});
  uint64_t checks = 0, failures = 0;

  // (a) mean increment: signed probability sum vs enumeration mean of delta_t.
  {
    const auto model =
        FieldModel<double>::moving(three_symbol, SiteSet::line(0, 1), Combiner::Sum);
    const SumFamily<double> fam(TargetSet<double>::interval(2.0, inf));
    const auto est = Estimator<double>::exact(model, SiteSet::line(0, 6));
    for (int32_t t = 0; t <= 3; ++t) {
      const auto via_prob = delta_mean(fam, est, SitePoint{t}, 1);
      const auto via_enum = est.mean([&](const FieldSample<double>& s) {
        return static_cast<double>(delta_pointwise(fam, s, SitePoint{t}, 1));
      });
      ++checks;
      if (std::abs(via_prob.point - via_enum.point) > kTol) ++failures;
    }
  }
  {
    const auto model = FieldModel<double>::iid(Marginal<double>::bernoulli(0.3));
    const UnionFamily<double> fam(TargetSet<double>::interval(1.0, inf));
    const auto est = Estimator<double>::exact(model, SiteSet::box({{0, 3}, {0, 3}}));
    for (int32_t a = 0; a <= 2; ++a)
      for (int32_t b = 0; b <= 2; ++b) {
        const auto via_prob = delta_mean(fam, est, SitePoint{a, b}, 1);
        const auto via_enum = est.mean([&](const FieldSample<double>& s) {
          return static_cast<double>(delta_pointwise(fam, s, SitePoint{a, b}, 1));
        });
        ++checks;
        if (std::abs(via_prob.point - via_enum.point) > kTol) ++failures;
      }
  }

  // (b) d=1 bridge: approx equals n (P(S_{m+1} in U) - P(S_m in U)).
  for (const auto& model :
       {FieldModel<double>::iid(Marginal<double>::bernoulli(0.25)),
        FieldModel<double>::moving(Marginal<double>::bernoulli(0.4), SiteSet::line(0, 1),
                                   Combiner::AllOnes)}) {
    for (int m = 0; m <= 2; ++m) {
      if (model.dependence_range() > 0 && m == 0) continue;  // m covers the dependence
      for (int n : {4, 6}) {
        const SumFamily<double> fam(TargetSet<double>::interval(1.0, inf));
        const auto lambda = SiteSet::line(1, n);
        const auto est = Estimator<double>::exact(model, window(lambda, m));
        const auto r = verify(AnyFamily<double>(fam), lambda, m, est, {});
        const auto t1 = theorem1_d1(fam, n, m, est);
        ++checks;
        if (std::abs(r.approx.point - t1.approx) > kTol) ++failures;
      }
    }
  }

  // (c) the wrapped family path reproduces the sum-field path bit for bit.
  {
    const auto model = FieldModel<double>::iid(Marginal<double>::bernoulli(0.1));
    const auto lambda = SiteSet::line(1, 5);
    const auto est = Estimator<double>::exact(model, window(lambda, 1));
    const auto direct =
        verify_sum_field(TargetSet<double>::interval(1.0, inf), lambda, 1, est, {});
    const auto wrapped = verify(
        AnyFamily<double>(SumFamily<double>(TargetSet<double>::interval(1.0, inf))), lambda, 1,
        est, {});
    ++checks;
    if (!reports_identical(direct, wrapped)) ++failures;
  }
  {
    const auto model = FieldModel<double>::iid(three_symbol);
    const auto lambda = SiteSet::box({{0, 0}, {0, 1}});
    const auto est = Estimator<double>::exact(model, window(lambda, 1));
    const auto target = TargetSet<double>::interval(3.0, inf);
    const auto direct = verify_sum_field(target, lambda, 1, est, {});
    const auto wrapped =
        verify(AnyFamily<double>(SumFamily<double>(target)), lambda, 1, est, {});
    ++checks;
    if (!reports_identical(direct, wrapped)) ++failures;
  }

  const double dt = seconds_since(t0);
  Line out;
  out.pass = failures == 0;
  out.text = "exact identities: " + std::to_string(checks) + " checks at 1e-12, " +
             std::to_string(failures) + " failures (" + fmt(dt, 1) + "s)";
  return out;
}

// ---------------------------------------------------------------------------
// 4. Classical union bound sandwich on random small event systems, exact.

Line criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  using Pred = Estimator<double>::PredFn;
  std::mt19937_64 rng(20260817);
  uint64_t failures = 0;

  for (int sys = 0; sys < 1000; ++sys) {
    const double p = 0.15 + 0.7 * std::uniform_real_distribution<double>()(rng);
    const auto model = FieldModel<double>::iid(Marginal<double>::bernoulli(p));
    const auto win = SiteSet::line(0, 5);
    const auto est = Estimator<double>::exact(model, win);

    std::vector<Pred> events;
    const int n_events = 2 + static_cast<int>(rng() % 3);  // 2..4 atoms
    for (int e = 0; e < n_events; ++e) {
      const int kind = static_cast<int>(rng() % 3);
      std::vector<size_t> subset;
      const size_t len = 1 + rng() % 3;
      for (size_t k = 0; k < len; ++k) subset.push_back(rng() % 6);
      const double thr = 1.0 + static_cast<double>(rng() % 2);
      events.push_back([kind, subset, thr](const FieldSample<double>& s) {
        if (kind == 0) return s.values[subset[0]] == 1.0;
        if (kind == 1) {
          double acc = 0.0;
          for (size_t i : subset) acc += s.values[i];
          return acc >= thr;
        }
        for (size_t i : subset)
          if (s.values[i] != 1.0) return false;
        return true;
      });
    }
    const auto r = classical_bonferroni<double>(events, est);
    if (!r.holds) ++failures;
  }

  // Equality cases: identical pair saturates the upper bound, disjoint events
  // saturate the lower one; both must land exactly.
  const auto model = FieldModel<double>::iid(Marginal<double>::bernoulli(0.5));
  const auto est = Estimator<double>::exact(model, SiteSet::line(0, 2));
  const Pred a = [](const FieldSample<double>& s) { return s.values[0] == 1.0; };
  const Pred not_a_and_b = [](const FieldSample<double>& s) {
    return s.values[0] == 0.0 && s.values[1] == 1.0;
  };
  const auto same = classical_bonferroni<double>({a, a}, est);
  if (!(same.holds && std::abs(same.gap.point - same.pair_bound.point) <= kTol &&
        std::abs(same.gap.point - 0.5) <= kTol))
    ++failures;
  const auto disjoint = classical_bonferroni<double>({a, not_a_and_b}, est);
  if (!(disjoint.holds && std::abs(disjoint.gap.point) <= kTol &&
        std::abs(disjoint.pair_bound.point) <= kTol))
    ++failures;

  const double dt = seconds_since(t0);
  Line out;
  out.pass = failures == 0;
  out.text = "union bound sandwich: 1000 random systems + equality cases, " +
             std::to_string(failures) + " failures (" + fmt(dt, 1) + "s)";
  return out;
}

// ---------------------------------------------------------------------------
// 5. Cover law: membership differences stay inside the per-site cover for
//    every built-in family, on all subset pairs of a 5-site window (full
//    enumeration) plus randomized larger instances.

template <class Family>
uint64_t cover_violations_full(const Family& fam, const FieldModel<double>& model,
                               const SiteSet& win, const std::vector<SiteSet>& subsets) {
  const auto est = Estimator<double>::exact(model, win);
  const auto viol = est.mean([&](const FieldSample<double>& s) {
    uint64_t bad = 0;
    for (const auto& t1 : subsets)
      for (const auto& t2 : subsets)
        if (!check_cover(fam, s, t1, t2)) ++bad;
    return static_cast<double>(bad);
  });
  return viol.point > 0.0 ? 1 : 0;
}

Line criterion5() {
  const auto t0 = std::chrono::steady_clock::now();
  const double inf = std::numeric_limits<double>::infinity();
  const auto three_symbol = Marginal<double>::table({0.0, 1.0, 2.0}, {0.5, 0.3, 0.2});
  uint64_t failures = 0;

  const auto win5 = SiteSet::line(0, 4);
  std::vector<SiteSet> subsets;
  for (uint32_t mask = 0; mask < 32; ++mask) {
    std::vector<SitePoint> pts;
    for (int b = 0; b < 5; ++b)
      if (mask & (1u << b)) pts.push_back(win5[static_cast<size_t>(b)]);
    subsets.push_back(SiteSet(std::move(pts)));
  }

  const auto model5 = FieldModel<double>::iid(three_symbol);
  failures += cover_violations_full(
      SumFamily<double>(TargetSet<double>::interval(1.0, inf)), model5, win5, subsets);
  failures += cover_violations_full(SumFamily<double>(TargetSet<double>::points({2.0})),
                                    model5, win5, subsets);
  failures += cover_violations_full(
      UnionFamily<double>(TargetSet<double>::interval(1.0, inf)), model5, win5, subsets);
  failures += cover_violations_full(
      ProductFamily<double>(TargetSet<double>::interval(2.0, inf)), model5, win5, subsets);
  failures += cover_violations_full(
      SemigroupFamily<double>(TargetSet<double>::interval(2.0, inf), 1.0,
                              SiteOrder::LexAscending),
      model5, win5, subsets);
  failures += cover_violations_full(max_family(1.5), model5, win5, subsets);

  // Randomized larger instances: random window sizes, random subset pairs.
  std::mt19937_64 rng(5150);
  uint64_t random_bad = 0;
  for (int inst = 0; inst < 500; ++inst) {
    const int w = 6 + static_cast<int>(rng() % 4);  // 6..9 sites
    const auto win = SiteSet::line(0, w - 1);
    const bool dep = rng() % 2 == 0;
    const auto model =
        dep ? FieldModel<double>::moving(Marginal<double>::bernoulli(0.4),
                                         SiteSet::line(0, 1), Combiner::Sum)
            : FieldModel<double>::iid(three_symbol);
    const auto pick_subset = [&]() {
      std::vector<SitePoint> pts;
      for (int b = 0; b < w; ++b)
        if (rng() % 2) pts.push_back(win[static_cast<size_t>(b)]);
      return SiteSet(std::move(pts));
    };
    const SiteSet t1 = pick_subset(), t2 = pick_subset();
    const int fam_pick = static_cast<int>(rng() % 4);
    const auto est = Estimator<double>::exact(model, win);
    const auto bad = est.mean([&](const FieldSample<double>& s) {
      bool ok = true;
      if (fam_pick == 0)
        ok = check_cover(SumFamily<double>(TargetSet<double>::interval(1.0, inf)), s, t1, t2);
      else if (fam_pick == 1)
        ok = check_cover(UnionFamily<double>(TargetSet<double>::interval(1.0, inf)), s, t1, t2);
      else if (fam_pick == 2)
        ok = check_cover(ProductFamily<double>(TargetSet<double>::interval(2.0, inf)), s, t1,
                         t2);
      else
        ok = check_cover(SemigroupFamily<double>(TargetSet<double>::interval(2.0, inf), 1.0,
                                                 SiteOrder::LexDescending),
                         s, t1, t2);
      return ok ? 0.0 : 1.0;
    });
    if (bad.point > 0.0) ++random_bad;
  }
  failures += random_bad;

  const double dt = seconds_since(t0);
  Line out;
  out.pass = failures == 0;
  out.text = "cover law: 6 families x 1024 subset pairs enumerated + 500 randomized, " +
             std::to_string(failures) + " failures (" + fmt(dt, 1) + "s)";
  return out;
}

// ---------------------------------------------------------------------------
// 6. Cluster-count experiment: exact grid holds outright; the large mc run
//    holds within the widened interval.

Line criterion6() {
  const auto t0 = std::chrono::steady_clock::now();
  uint64_t failures = 0;

  EstimatorSpec ex;
  ex.exact = true;
  for (const int n : {8, 12, 16})
    for (const double rate : {0.5, 1.0}) {
      const auto rep = run_compound_poisson(rate, n, 1, 3, ex);
      for (const auto& row : rep.rows)
        if (row.verdict != Verdict::Holds) ++failures;
    }

  EstimatorSpec mc;
  mc.exact = false;
  mc.mc_opt.n_samples = 1000000;
  mc.mc_opt.seed = 2026;
  const auto big = run_compound_poisson(1.0, 10000, 1, 3, mc);
  for (const auto& row : big.rows)
    if (row.verdict != Verdict::HoldsWithinCi) ++failures;

  const double dt = seconds_since(t0);
  Line out;
  out.pass = failures == 0 && dt < 300.0;
  out.text = "cluster-count bound: 6 exact grids (k=1..3) hold, mc n=10^4 with 10^6 samples "
             "holds within CI, " +
             std::to_string(failures) + " failures (" + fmt(dt, 1) + "s)";
  if (dt >= 300.0) out.text += " [over the 300s budget]";
  return out;
}

// ---------------------------------------------------------------------------
// 7. Heavy-tail scaling at desk scale, as pinned: iid u(10) inside
//    [0.85, 1.15]; one-dependent |u - v| within the combined 99% CI at
//    x in {5, 10}. Measured values are printed either way.

Line criterion7() {
  const auto t0 = std::chrono::steady_clock::now();
  EstimatorSpec mc;
  mc.exact = false;
  mc.mc_opt.n_samples = 1000000;
  mc.mc_opt.seed = 99;

  const auto iid = run_large_dev(0.8, 1000, 0, SiteSet({SitePoint{0}}), {10.0}, mc);
  const double u10 = iid.rows[0].u;
  const bool iid_ok = u10 >= 0.85 && u10 <= 1.15;

  mc.mc_opt.seed = 100;
  const auto dep = run_large_dev(0.8, 1000, 1, SiteSet::line(0, 1), {5.0, 10.0}, mc);
  bool dep_ok = true;
  std::string dep_detail;
  for (const auto& row : dep.rows) {
    dep_ok = dep_ok && row.within;
    dep_detail += " x=" + fmt(row.x, 0) + ": |u-v|=" + fmt(row.diff) + " vs ci=" +
                  fmt(row.combined_half_width) + (row.within ? " (within)" : " (outside)");
  }

  const double dt = seconds_since(t0);
  Line out;
  out.pass = iid_ok && dep_ok && dt < 300.0;
  out.text = "heavy-tail scaling: iid u(10)=" + fmt(u10) + " target [0.85,1.15]" +
             (iid_ok ? " (inside)" : " (outside)") + "; 1-dep" + dep_detail + " (" +
             fmt(dt, 1) + "s)";
  return out;
}

// ---------------------------------------------------------------------------
// 8. Determinism: identical configs give byte-identical CSV at parallelism
//    1 and 8 and across reruns, for a verify run and both mc experiments.

namespace fs = std::filesystem;

int run_cmd(const std::string& cmd) {
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

Line criterion8() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string cli = FIELDBOUND_CLI_PATH;
  const fs::path dir = fs::temp_directory_path() / "fieldbound_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  uint64_t failures = 0;

  const fs::path cfg = dir / "cfg.json";
  {
    std::ofstream out(cfg);
    out << R"({
      "model": {"kind": "moving", "marginal": {"type": "bernoulli", "p": 0.3},
                "offsets": [[0, 0], [0, 1], [1, 0], [1, 1]], "combiner": "sum"},
      "family": {"family": "sum", "target": {"type": "interval", "lo": 2}},
      "lambda": {"box": [[0, 2], [0, 2]]},
      "m": 1,
      "estimator": {"backend": "mc", "n_samples": 120000, "seed": 7}
    })";
  }
  const auto q = [](const fs::path& p) { return p.string(); };
  const std::string devnull = " > /dev/null 2>&1";
  bool ok = true;
  ok &= run_cmd(cli + " verify --config " + q(cfg) + " --out " + q(dir / "v1") +
                " --threads 1" + devnull) == 0;
  ok &= run_cmd(cli + " verify --config " + q(cfg) + " --out " + q(dir / "v8") +
                " --threads 8" + devnull) == 0;
  ok &= run_cmd(cli + " verify --config " + q(cfg) + " --out " + q(dir / "v1b") +
                " --threads 1" + devnull) == 0;
  const std::string v1 = slurp(dir / "v1" / "report.csv");
  if (!ok || v1.empty() || v1 != slurp(dir / "v8" / "report.csv") ||
      v1 != slurp(dir / "v1b" / "report.csv"))
    ++failures;

  const std::string cp_args = " compound-poisson --rate 1 --n 200 --kmax 2 --samples 50000"
                              " --seed 3";
  ok = run_cmd(cli + cp_args + " --threads 1 --out " + q(dir / "c1") + devnull) == 0;
  ok &= run_cmd(cli + cp_args + " --threads 8 --out " + q(dir / "c8") + devnull) == 0;
  const std::string c1 = slurp(dir / "c1" / "compound_poisson.csv");
  if (!ok || c1.empty() || c1 != slurp(dir / "c8" / "compound_poisson.csv")) ++failures;

  const std::string ld_args = " large-dev --alpha 0.8 --n 100 --x 5 --samples 30000 --seed 4";
  ok = run_cmd(cli + ld_args + " --threads 1 --out " + q(dir / "l1") + devnull) == 0;
  ok &= run_cmd(cli + ld_args + " --threads 8 --out " + q(dir / "l8") + devnull) == 0;
  const std::string l1 = slurp(dir / "l1" / "large_dev.csv");
  if (!ok || l1.empty() || l1 != slurp(dir / "l8" / "large_dev.csv")) ++failures;

  fs::remove_all(dir);
  const double dt = seconds_since(t0);
  Line out;
  out.pass = failures == 0;
  out.text = "determinism: verify + both mc experiments byte-identical at threads 1 vs 8 "
             "and across reruns, " +
             std::to_string(failures) + " mismatches (" + fmt(dt, 1) + "s)";
  return out;
}

}  // namespace

int main() {
  const std::vector<std::function<Line()>> criteria = {
      criterion1, criterion2, criterion3, criterion4,
      criterion5, criterion6, criterion7, criterion8};
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const Line line = criteria[i]();
    if (!line.pass) ++failed;
    std::cout << (line.pass ? "[PASS] " : "[FAIL] ") << (i + 1) << ". " << line.text
              << std::endl;
  }
  std::cout << "acceptance: " << (criteria.size() - static_cast<size_t>(failed)) << "/"
            << criteria.size() << " criteria pass" << std::endl;
  return failed;
}
