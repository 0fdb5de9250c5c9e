#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fieldbound/bounds.hpp"
#include "fieldbound/specs.hpp"
#include "json.hpp"

namespace fieldbound {

// Cluster-count experiment: Y_i iid Bernoulli(p_n) with p_n = sqrt(rate/n),
// A_i = {Y_i = 1, Y_{i+1} = 1}, K = # occupied A_i over {1..n}. For each
// k in 1..k_max the d=1 bound is checked on P(K = k).
struct CompoundPoissonReport {
  double rate = 0.0;
  double p_n = 0.0;
  int n = 0, m = 0;
  std::string model;
  std::string backend;
  uint64_t seed = 0;
  std::vector<int> ks;
  std::vector<Theorem1Report> rows;
  bool all_hold = false;
};
CompoundPoissonReport run_compound_poisson(double rate, int n, int m, int k_max,
                                           const EstimatorSpec& spec);

// Heavy-tail scaling experiment: X_i = sum of Pareto(alpha) noise over the
// offsets, B_n = n^(1/alpha),
//   u(x) = x^alpha P(S_n / B_n > x),
//   v(x) = x^alpha n (P(S_{m+1} > x B_n) - P(S_m > x B_n)).
// In the iid case v(x) = 1 exactly (for x B_n >= 1); in general u and v
// should agree within the combined CI once n is large. alpha is restricted
// to (0,1): no centering terms are implemented.
struct LargeDevRow {
  double x = 0.0;
  double u = 0.0, u_half_width = 0.0;
  double v = 0.0, v_half_width = 0.0;
  double diff = 0.0;
  double combined_half_width = 0.0;
  bool within = false;
};
struct LargeDevReport {
  double alpha = 0.0;
  int n = 0, m = 0;
  double b_n = 0.0;
  std::string model;
  std::string backend;
  uint64_t seed = 0;
  std::vector<LargeDevRow> rows;
  bool all_within = false;
};
LargeDevReport run_large_dev(double alpha, int n, int m, const SiteSet& offsets,
                             const std::vector<double>& x_list, const EstimatorSpec& spec);

// Truncation comparison: Z_j = X_j if X_j >= B_n x delta, else 0; reports
// x^alpha |P(S_n/B_n > x) - P(sum_j Z_j / B_n > x)| with a CI from the
// per-sample indicator difference. Reported, not asserted.
struct TruncationReport {
  double alpha = 0.0;
  int n = 0;
  double x = 0.0, delta = 0.0, b_n = 0.0;
  std::string backend;
  uint64_t seed = 0;
  ProbEstimate full, truncated;
  double discrepancy = 0.0;
  double discrepancy_half_width = 0.0;
};
TruncationReport run_truncation(double alpha, int n, double x, double delta,
                                const EstimatorSpec& spec);

nlohmann::json to_json(const CompoundPoissonReport& r);
nlohmann::json to_json(const LargeDevReport& r);
nlohmann::json to_json(const TruncationReport& r);
std::string csv_table(const CompoundPoissonReport& r);
std::string csv_table(const LargeDevReport& r);
std::string csv_table(const TruncationReport& r);

}  // namespace fieldbound
