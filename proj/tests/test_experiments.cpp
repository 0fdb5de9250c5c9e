#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "fieldbound/experiments.hpp"
#include "json.hpp"

using namespace fieldbound;
using nlohmann::json;

namespace {

EstimatorSpec exact_spec() {
  EstimatorSpec s;
  s.exact = true;
  return s;
}

EstimatorSpec mc_spec(uint64_t n, uint64_t seed) {
  EstimatorSpec s;
  s.exact = false;
  s.mc_opt.n_samples = n;
  s.mc_opt.seed = seed;
  return s;
}

// Independent oracle: P(#{i in 1..n : Y_i = Y_{i+1} = 1} = k) by direct
// enumeration of the n+1 Bernoulli bits.
double cluster_count_prob(int n, double p, int k) {
  double total = 0.0;
  for (uint32_t bits = 0; bits < (1u << (n + 1)); ++bits) {
    int count = 0, ones = 0;
    for (int i = 0; i <= n; ++i) ones += (bits >> i) & 1;
    for (int i = 0; i < n; ++i) count += ((bits >> i) & 1) && ((bits >> (i + 1)) & 1);
    if (count == k) total += std::pow(p, ones) * std::pow(1.0 - p, n + 1 - ones);
  }
  return total;
}

}  // namespace

TEST_CASE("cluster-count experiment matches the bit-level oracle exactly") {
  const int n = 12;
  const auto rep = run_compound_poisson(1.0, n, 1, 3, exact_spec());
  const double p = std::sqrt(1.0 / n);
  CHECK(rep.p_n == doctest::Approx(p).epsilon(1e-15));
  CHECK(rep.n == n);
  CHECK(rep.m == 1);
  CHECK(rep.ks == std::vector<int>{1, 2, 3});
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.all_hold);

  for (size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& t = rep.rows[i];
    CHECK(t.verdict == Verdict::Holds);
    CHECK(t.target.point ==
          doctest::Approx(cluster_count_prob(n, p, rep.ks[i])).epsilon(1e-10));
    // 1-dependent cluster field: 55 far pairs, each with joint probability p^4.
    CHECK(t.bound == doctest::Approx(2.0 * p * p + 2.0 * 55.0 * p * p * p * p).epsilon(1e-10));
  }
  // n (P(S_2 = k) - P(S_1 = k)) in closed form: n p^2 (1 - 2p) for k = 1,
  // n p^3 for k = 2, 0 for k = 3.
  CHECK(rep.rows[0].approx == doctest::Approx(n * p * p * (1.0 - 2.0 * p)).epsilon(1e-10));
  CHECK(rep.rows[1].approx == doctest::Approx(n * p * p * p).epsilon(1e-10));
  CHECK(rep.rows[2].approx == 0.0);
}

TEST_CASE("zero rate degenerates to the empty field") {
  const auto rep = run_compound_poisson(0.0, 10, 1, 2, exact_spec());
  CHECK(rep.p_n == 0.0);
  for (const auto& t : rep.rows) {
    CHECK(t.target.point == 0.0);
    CHECK(t.approx == 0.0);
    CHECK(t.bound == 0.0);
    CHECK(t.verdict == Verdict::Holds);
  }
  CHECK(rep.all_hold);
}

TEST_CASE("cluster-count experiment under mc stays within its interval") {
  const auto rep = run_compound_poisson(1.0, 50, 1, 2, mc_spec(40000, 5));
  CHECK(rep.backend.find("mc") == 0);
  CHECK(rep.all_hold);
  const double p = std::sqrt(1.0 / 50.0);
  for (const auto& t : rep.rows) {
    CHECK(t.verdict == Verdict::HoldsWithinCi);
    // The exact bound is known in closed form; mc should land close.
    const double exact_bound = 2.0 * p * p + 2.0 * 1176.0 * p * p * p * p;
    CHECK(std::abs(t.bound - exact_bound) <= t.bound_half_width + 0.05);
  }
}

TEST_CASE("cluster-count experiment validates inputs") {
  CHECK_THROWS_AS(run_compound_poisson(-1.0, 10, 1, 2, exact_spec()), std::invalid_argument);
  CHECK_THROWS_AS(run_compound_poisson(20.0, 10, 1, 2, exact_spec()),
                  std::invalid_argument);  // p_n > 1
  CHECK_THROWS_AS(run_compound_poisson(1.0, 0, 1, 2, exact_spec()), std::invalid_argument);
  CHECK_THROWS_AS(run_compound_poisson(1.0, 10, -1, 2, exact_spec()), std::invalid_argument);
  CHECK_THROWS_AS(run_compound_poisson(1.0, 10, 1, 0, exact_spec()), std::invalid_argument);
}

TEST_CASE("heavy-tail scaling: iid block difference sits at one") {
  const int n = 50;
  const double alpha = 0.5;
  const auto rep =
      run_large_dev(alpha, n, 0, SiteSet({SitePoint{0}}), {4.0}, mc_spec(40000, 3));
  CHECK(rep.b_n == doctest::Approx(std::pow(n, 1.0 / alpha)).epsilon(1e-15));
  CHECK(rep.m == 0);
  REQUIRE(rep.rows.size() == 1);
  const auto& row = rep.rows[0];
  CHECK(row.x == 4.0);
  // v estimates x^alpha n P(Y > x B_n) whose true value is exactly 1.
  CHECK(std::abs(row.v - 1.0) <= row.v_half_width + 1e-9);
  CHECK(row.u > 0.0);
  CHECK(row.diff == std::abs(row.u - row.v));
  CHECK(row.combined_half_width == row.u_half_width + row.v_half_width);
  CHECK(row.within == (row.diff <= row.combined_half_width + 1e-12));
}

TEST_CASE("heavy-tail scaling: one-dependent moving sums run end to end") {
  const auto rep = run_large_dev(0.8, 50, 1, SiteSet::line(0, 1), {3.0, 6.0}, mc_spec(20000, 9));
  CHECK(rep.m == 1);
  CHECK(rep.model.find("moving") == 0);
  REQUIRE(rep.rows.size() == 2);
  for (const auto& row : rep.rows) {
    CHECK(row.u > 0.0);
    CHECK(row.v_half_width > 0.0);
  }
}

TEST_CASE("heavy-tail scaling validates inputs") {
  const SiteSet o({SitePoint{0}});
  CHECK_THROWS_AS(run_large_dev(1.0, 50, 0, o, {4.0}, mc_spec(100, 1)), std::invalid_argument);
  CHECK_THROWS_AS(run_large_dev(0.0, 50, 0, o, {4.0}, mc_spec(100, 1)), std::invalid_argument);
  CHECK_THROWS_AS(run_large_dev(0.5, 0, 0, o, {4.0}, mc_spec(100, 1)), std::invalid_argument);
  CHECK_THROWS_AS(run_large_dev(0.5, 50, 0, o, {0.0}, mc_spec(100, 1)), std::invalid_argument);
  CHECK_THROWS_AS(run_large_dev(0.5, 50, 0, o, {}, mc_spec(100, 1)), std::invalid_argument);
}

TEST_CASE("truncation discrepancy is nonnegative and bounded by its parts") {
  const auto rep = run_truncation(0.8, 50, 5.0, 0.1, mc_spec(20000, 4));
  CHECK(rep.b_n == doctest::Approx(std::pow(50.0, 1.25)).epsilon(1e-12));
  // Removing small values can only lower the sum, so the full-tail indicator
  // dominates the truncated one sample by sample.
  CHECK(rep.full.point >= rep.truncated.point);
  CHECK(rep.discrepancy >= 0.0);
  CHECK(rep.discrepancy ==
        doctest::Approx(std::pow(5.0, 0.8) * (rep.full.point - rep.truncated.point))
            .epsilon(1e-12));
  CHECK(rep.discrepancy_half_width >= 0.0);
}

TEST_CASE("truncation keeps everything at delta = 1 tail levels") {
  // With delta = 1 only values at or above x B_n survive; the truncated tail
  // event is then exactly {max >= x B_n} which the full sum implies.
  const auto rep = run_truncation(0.5, 20, 3.0, 1.0, mc_spec(20000, 8));
  CHECK(rep.full.point >= rep.truncated.point);
  CHECK(rep.discrepancy >= 0.0);
}

TEST_CASE("truncation validates inputs") {
  CHECK_THROWS_AS(run_truncation(0.5, 20, 3.0, 0.0, mc_spec(100, 1)), std::invalid_argument);
  CHECK_THROWS_AS(run_truncation(0.5, 20, 3.0, 1.5, mc_spec(100, 1)), std::invalid_argument);
  CHECK_THROWS_AS(run_truncation(1.5, 20, 3.0, 0.5, mc_spec(100, 1)), std::invalid_argument);
  CHECK_THROWS_AS(run_truncation(0.5, 20, -1.0, 0.5, mc_spec(100, 1)), std::invalid_argument);
}

TEST_CASE("experiment serializers emit stable tables") {
  const auto cp = run_compound_poisson(1.0, 10, 1, 2, exact_spec());
  const std::string cp_csv = csv_table(cp);
  CHECK(cp_csv.find("k,target,approx,error,bound,error_half_width,bound_half_width,verdict\n") ==
        0);
  CHECK(csv_table(cp) == cp_csv);
  const json cp_json = to_json(cp);
  CHECK(cp_json["rate"].get<double>() == 1.0);
  CHECK(cp_json["rows"].size() == 2);
  CHECK(cp_json["rows"][0]["k"].get<int>() == 1);
  CHECK(cp_json["all_hold"].get<bool>());

  const auto ld = run_large_dev(0.5, 20, 0, SiteSet({SitePoint{0}}), {4.0}, mc_spec(5000, 2));
  const std::string ld_csv = csv_table(ld);
  CHECK(ld_csv.find("x,u,u_half_width,v,v_half_width,diff,combined_half_width,within\n") == 0);
  const json ld_json = to_json(ld);
  CHECK(ld_json["alpha"].get<double>() == 0.5);
  CHECK(ld_json["rows"][0]["x"].get<double>() == 4.0);

  const auto tr = run_truncation(0.5, 20, 3.0, 0.5, mc_spec(5000, 2));
  const std::string tr_csv = csv_table(tr);
  CHECK(tr_csv.find("x,delta,full,trunc,discrepancy,discrepancy_half_width\n") == 0);
  const json tr_json = to_json(tr);
  CHECK(tr_json["delta"].get<double>() == 0.5);
  CHECK(tr_json["full"]["point"].get<double>() == tr.full.point);
}
