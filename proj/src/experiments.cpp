#include "fieldbound/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "fieldbound/report.hpp"

namespace fieldbound {

namespace {

std::string fmt_label(const char* prefix, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%.17g)", prefix, v);
  return buf;
}

}  // namespace

CompoundPoissonReport run_compound_poisson(double rate, int n, int m, int k_max,
                                           const EstimatorSpec& spec) {
  if (!(rate >= 0.0)) throw std::invalid_argument("compound-poisson: rate must be >= 0");
  if (n < 1) throw std::invalid_argument("compound-poisson: n must be >= 1");
  if (m < 0) throw std::invalid_argument("compound-poisson: m must be >= 0");
  if (k_max < 1) throw std::invalid_argument("compound-poisson: k_max must be >= 1");
  const double p_n = std::sqrt(rate / n);
  if (!(p_n <= 1.0))
    throw std::invalid_argument("compound-poisson: rate must be <= n so that p_n <= 1");

  const auto model = FieldModel<double>::moving(Marginal<double>::bernoulli(p_n),
                                                SiteSet::line(0, 1), Combiner::AllOnes);
  const auto win = SiteSet::line(1, std::max(n, m + 1));
  const auto est = spec.build(model, win);

  std::vector<TargetSet<double>> targets;
  std::vector<int> ks;
  for (int k = 1; k <= k_max; ++k) {
    targets.push_back(TargetSet<double>::points({static_cast<double>(k)}));
    ks.push_back(k);
  }

  CompoundPoissonReport r;
  r.rate = rate;
  r.p_n = p_n;
  r.n = n;
  r.m = m;
  r.model = model.describe();
  r.backend = est.describe();
  r.seed = est.seed();
  r.ks = std::move(ks);
  r.rows = detail::theorem1_d1_multi<double>(targets, n, m, est, 0.0);
  r.all_hold = true;
  for (const auto& row : r.rows)
    if (row.verdict == Verdict::Violated) r.all_hold = false;
  return r;
}

LargeDevReport run_large_dev(double alpha, int n, int m, const SiteSet& offsets,
                             const std::vector<double>& x_list, const EstimatorSpec& spec) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("large-dev: alpha must lie in (0,1)");
  if (n < 1) throw std::invalid_argument("large-dev: n must be >= 1");
  if (m < 0) throw std::invalid_argument("large-dev: m must be >= 0");
  if (x_list.empty()) throw std::invalid_argument("large-dev: x list must be non-empty");
  for (double x : x_list)
    if (!(x > 0.0)) throw std::invalid_argument("large-dev: levels x must be positive");

  const double b_n = std::pow(static_cast<double>(n), 1.0 / alpha);
  const auto model =
      FieldModel<double>::moving(Marginal<double>::pareto(alpha), offsets, Combiner::Sum);
  const auto win = SiteSet::line(1, std::max(n, m + 1));
  const auto est = spec.build(model, win);

  std::vector<TargetSet<double>> targets;
  for (double x : x_list) {
    const double c = x * b_n;
    targets.push_back(
        TargetSet<double>::predicate([c](const double& s) { return s > c; },
                                     fmt_label("(>", c)));
  }
  const auto t1 = detail::theorem1_d1_multi<double>(targets, n, m, est, 0.0);

  LargeDevReport r;
  r.alpha = alpha;
  r.n = n;
  r.m = m;
  r.b_n = b_n;
  r.model = model.describe();
  r.backend = est.describe();
  r.seed = est.seed();
  r.all_within = true;
  for (size_t i = 0; i < x_list.size(); ++i) {
    const double scale = std::pow(x_list[i], alpha);
    LargeDevRow row;
    row.x = x_list[i];
    row.u = scale * t1[i].target.point;
    row.u_half_width = scale * t1[i].target.half_width;
    row.v = scale * t1[i].approx;
    row.v_half_width = scale * t1[i].approx_half_width;
    row.diff = std::abs(row.u - row.v);
    row.combined_half_width = row.u_half_width + row.v_half_width;
    row.within = row.diff <= row.combined_half_width + kExactTolerance;
    if (!row.within) r.all_within = false;
    r.rows.push_back(row);
  }
  return r;
}

namespace {

struct TruncAcc {
  double cut = 0.0;      // B_n * x * delta
  double level = 0.0;    // B_n * x
  detail::Neumaier sum[3], sumsq[3];  // full indicator, truncated indicator, difference

  void accumulate(const std::vector<double>& vals, double w) {
    double s = 0.0, s_trunc = 0.0;
    for (double v : vals) {
      s += v;
      if (v >= cut) s_trunc += v;
    }
    const double f[3] = {s > level ? 1.0 : 0.0, s_trunc > level ? 1.0 : 0.0,
                         (s > level ? 1.0 : 0.0) - (s_trunc > level ? 1.0 : 0.0)};
    for (int i = 0; i < 3; ++i) {
      sum[i].add(w * f[i]);
      sumsq[i].add(w * f[i] * f[i]);
    }
  }
  void merge(const TruncAcc& o) {
    for (int i = 0; i < 3; ++i) {
      sum[i].add(o.sum[i].get());
      sumsq[i].add(o.sumsq[i].get());
    }
  }
};

}  // namespace

TruncationReport run_truncation(double alpha, int n, double x, double delta,
                                const EstimatorSpec& spec) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("truncation: alpha must lie in (0,1)");
  if (n < 1) throw std::invalid_argument("truncation: n must be >= 1");
  if (!(x > 0.0)) throw std::invalid_argument("truncation: x must be positive");
  if (!(delta > 0.0 && delta <= 1.0))
    throw std::invalid_argument("truncation: delta must lie in (0,1]");

  const double b_n = std::pow(static_cast<double>(n), 1.0 / alpha);
  const auto model = FieldModel<double>::iid(Marginal<double>::pareto(alpha));
  const auto win = SiteSet::line(1, n);
  const auto est = spec.build(model, win);

  TruncAcc proto;
  proto.cut = b_n * x * delta;
  proto.level = b_n * x;
  const auto acc = est.reduce(proto);

  TruncationReport r;
  r.alpha = alpha;
  r.n = n;
  r.x = x;
  r.delta = delta;
  r.b_n = b_n;
  r.backend = est.describe();
  r.seed = est.seed();
  const auto full = est.finalize_slot(acc.sum[0], acc.sumsq[0]);
  const auto trunc = est.finalize_slot(acc.sum[1], acc.sumsq[1]);
  r.full = ProbEstimate{full.point, full.half_width, full.n};
  r.truncated = ProbEstimate{trunc.point, trunc.half_width, trunc.n};
  const auto diff = est.finalize_slot(acc.sum[2], acc.sumsq[2]);
  const double scale = std::pow(x, alpha);
  r.discrepancy = scale * std::abs(diff.point);
  r.discrepancy_half_width = scale * diff.half_width;
  return r;
}

nlohmann::json to_json(const CompoundPoissonReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (size_t i = 0; i < r.rows.size(); ++i) {
    auto row = to_json(r.rows[i]);
    row["k"] = r.ks[i];
    rows.push_back(std::move(row));
  }
  return {{"rate", r.rate}, {"p_n", r.p_n},        {"n", r.n},
          {"m", r.m},       {"model", r.model},    {"backend", r.backend},
          {"seed", r.seed}, {"rows", rows},        {"all_hold", r.all_hold}};
}

nlohmann::json to_json(const LargeDevReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"x", row.x},
                    {"u", row.u},
                    {"u_half_width", row.u_half_width},
                    {"v", row.v},
                    {"v_half_width", row.v_half_width},
                    {"diff", row.diff},
                    {"combined_half_width", row.combined_half_width},
                    {"within", row.within}});
  return {{"alpha", r.alpha},   {"n", r.n},
          {"m", r.m},           {"b_n", r.b_n},
          {"model", r.model},   {"backend", r.backend},
          {"seed", r.seed},     {"rows", rows},
          {"all_within", r.all_within}};
}

nlohmann::json to_json(const TruncationReport& r) {
  return {{"alpha", r.alpha},
          {"n", r.n},
          {"x", r.x},
          {"delta", r.delta},
          {"b_n", r.b_n},
          {"backend", r.backend},
          {"seed", r.seed},
          {"full", to_json(r.full)},
          {"truncated", to_json(r.truncated)},
          {"discrepancy", r.discrepancy},
          {"discrepancy_half_width", r.discrepancy_half_width}};
}

std::string csv_table(const CompoundPoissonReport& r) {
  std::string s =
      "k,target,approx,error,bound,error_half_width,bound_half_width,verdict\n";
  for (size_t i = 0; i < r.rows.size(); ++i) {
    const auto& t = r.rows[i];
    s += std::to_string(r.ks[i]) + ',';
    s += num_str(t.target.point) + ',';
    s += num_str(t.approx) + ',';
    s += num_str(t.error) + ',';
    s += num_str(t.bound) + ',';
    s += num_str(t.error_half_width) + ',';
    s += num_str(t.bound_half_width) + ',';
    s += to_string(t.verdict);
    s += '\n';
  }
  return s;
}

std::string csv_table(const LargeDevReport& r) {
  std::string s = "x,u,u_half_width,v,v_half_width,diff,combined_half_width,within\n";
  for (const auto& row : r.rows) {
    s += num_str(row.x) + ',';
    s += num_str(row.u) + ',';
    s += num_str(row.u_half_width) + ',';
    s += num_str(row.v) + ',';
    s += num_str(row.v_half_width) + ',';
    s += num_str(row.diff) + ',';
    s += num_str(row.combined_half_width) + ',';
    s += row.within ? "1" : "0";
    s += '\n';
  }
  return s;
}

std::string csv_table(const TruncationReport& r) {
  std::string s = "x,delta,full,trunc,discrepancy,discrepancy_half_width\n";
  s += num_str(r.x) + ',';
  s += num_str(r.delta) + ',';
  s += num_str(r.full.point) + ',';
  s += num_str(r.truncated.point) + ',';
  s += num_str(r.discrepancy) + ',';
  s += num_str(r.discrepancy_half_width);
  s += '\n';
  return s;
}

}  // namespace fieldbound
