#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fieldbound/bounds.hpp"
#include "fieldbound/experiments.hpp"
#include "fieldbound/report.hpp"
#include "fieldbound/specs.hpp"

namespace fb = fieldbound;
using nlohmann::json;

namespace {

json load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw fb::ConfigError("config: cannot open file " + path);
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw fb::ConfigError("config: invalid JSON in " + path + ": " + e.what());
  }
}

struct OutputOptions {
  std::string dir = ".";
  std::string format = "both";  // csv | json | both

  bool want_csv() const { return format != "json"; }
  bool want_json() const { return format != "csv"; }

  std::string emit(const std::string& base, const json& j, const std::string& csv) const {
    std::filesystem::create_directories(dir);
    std::string written;
    if (want_json()) {
      const auto p = (std::filesystem::path(dir) / (base + ".json")).string();
      fb::write_text_atomic(p, j.dump(2) + "\n");
      written += p;
    }
    if (want_csv()) {
      const auto p = (std::filesystem::path(dir) / (base + ".csv")).string();
      fb::write_text_atomic(p, csv);
      if (!written.empty()) written += ' ';
      written += p;
    }
    return written;
  }
};

void add_output_flags(CLI::App* cmd, OutputOptions& out) {
  cmd->add_option("--out", out.dir, "Output directory for report files");
  cmd->add_option("--format", out.format, "Report files to write: csv, json, or both")
      ->check(CLI::IsMember({"csv", "json", "both"}));
}

struct EstimatorFlags {
  bool exact = false;
  uint64_t samples = 1000000;
  uint64_t seed = 0;
  double confidence = 0.99;
  unsigned threads = 0;

  fb::EstimatorSpec spec() const {
    fb::EstimatorSpec s;
    if (exact) {
      s.exact = true;
      s.exact_opt.threads = threads;
    } else {
      s.exact = false;
      s.mc_opt.n_samples = samples;
      s.mc_opt.seed = seed;
      s.mc_opt.confidence = confidence;
      s.mc_opt.threads = threads;
    }
    return s;
  }

  json echo() const {
    if (exact) return {{"backend", "exact"}, {"threads", threads}};
    return {{"backend", "mc"},
            {"n_samples", samples},
            {"seed", seed},
            {"confidence", confidence},
            {"threads", threads}};
  }
};

void add_estimator_flags(CLI::App* cmd, EstimatorFlags& est) {
  cmd->add_flag("--exact", est.exact, "Use exact enumeration instead of Monte Carlo");
  cmd->add_option("--samples", est.samples, "Monte Carlo sample count");
  cmd->add_option("--seed", est.seed, "Monte Carlo seed");
  cmd->add_option("--confidence", est.confidence, "CI confidence level in (0,1)");
  cmd->add_option("--threads", est.threads, "Worker threads (0 = hardware default)");
}

int cmd_verify(const std::string& config_path, const OutputOptions& out, bool pointwise_flag,
               std::optional<uint64_t> seed, std::optional<uint64_t> samples,
               std::optional<unsigned> threads) {
  const json cfg = load_config(config_path);
  fb::VerifyConfig vc = fb::parse_verify_config(cfg);
  if (pointwise_flag) vc.pointwise = true;
  if (seed || samples) {
    if (vc.estimator.exact)
      throw fb::ConfigError("config: --seed and --samples apply to the mc backend only");
    if (seed) vc.estimator.mc_opt.seed = *seed;
    if (samples) {
      if (*samples < 1) throw fb::ConfigError("config: --samples must be >= 1");
      vc.estimator.mc_opt.n_samples = *samples;
    }
  }
  if (threads) {
    vc.estimator.exact_opt.threads = *threads;
    vc.estimator.mc_opt.threads = *threads;
  }

  const fb::SiteSet win = fb::window(vc.lambda, vc.m);
  const auto est = vc.estimator.build(vc.model, win);
  const auto r = fb::verify(vc.family, vc.lambda, vc.m, est, fb::VerifyOptions{vc.pointwise});

  const json doc = {{"version", fb::kVersion},
                    {"command", "verify"},
                    {"config", cfg},
                    {"report", fb::to_json(r)}};
  const std::string files = out.emit("report", doc, fb::csv_header() + "\n" + fb::csv_row(r) + "\n");

  std::cout << "verify: verdict=" << fb::to_string(r.verdict) << " error=" << fb::num_str(r.error)
            << " bound=" << fb::num_str(r.bound) << " slack=" << fb::num_str(r.slack) << " ("
            << r.backend << ")\n";
  if (r.pointwise_ran)
    std::cout << "pointwise: " << r.pointwise_checked << " outcomes checked, "
              << r.pointwise_violations << " violations\n";
  std::cout << "wrote " << files << "\n";
  return r.verdict == fb::Verdict::Violated ? 1 : 0;
}

int cmd_compound_poisson(double rate, int n, int m, int k_max, const EstimatorFlags& est,
                         const OutputOptions& out) {
  const auto rep = fb::run_compound_poisson(rate, n, m, k_max, est.spec());
  const json doc = {{"version", fb::kVersion},
                    {"command", "compound-poisson"},
                    {"args",
                     {{"rate", rate},
                      {"n", n},
                      {"m", m},
                      {"k_max", k_max},
                      {"estimator", est.echo()}}},
                    {"report", fb::to_json(rep)}};
  const std::string files = out.emit("compound_poisson", doc, fb::csv_table(rep));

  for (size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& t = rep.rows[i];
    std::cout << "k=" << rep.ks[i] << ": target=" << fb::num_str(t.target.point)
              << " approx=" << fb::num_str(t.approx) << " error=" << fb::num_str(t.error)
              << " bound=" << fb::num_str(t.bound) << " -> " << fb::to_string(t.verdict) << "\n";
  }
  std::cout << "wrote " << files << "\n";
  return rep.all_hold ? 0 : 1;
}

int cmd_large_dev(double alpha, int n, std::optional<int> m_opt, const std::string& dep,
                  std::vector<double> xs, const EstimatorFlags& est, const OutputOptions& out) {
  fb::SiteSet offsets;
  int m = 0;
  if (dep == "iid") {
    offsets = fb::SiteSet({fb::SitePoint{0}});
    m = 0;
  } else if (dep == "moving") {
    offsets = fb::SiteSet::line(0, 1);
    m = 1;
  } else {
    throw fb::ConfigError("config: --dep must be iid or moving");
  }
  if (m_opt) m = *m_opt;
  if (xs.empty()) xs = {5.0, 10.0};

  const auto rep = fb::run_large_dev(alpha, n, m, offsets, xs, est.spec());
  const json doc = {{"version", fb::kVersion},
                    {"command", "large-dev"},
                    {"args",
                     {{"alpha", alpha},
                      {"n", n},
                      {"m", m},
                      {"dep", dep},
                      {"x", xs},
                      {"estimator", est.echo()}}},
                    {"report", fb::to_json(rep)}};
  const std::string files = out.emit("large_dev", doc, fb::csv_table(rep));

  for (const auto& row : rep.rows)
    std::cout << "x=" << fb::num_str(row.x) << ": u=" << fb::num_str(row.u)
              << " v=" << fb::num_str(row.v) << " |u-v|=" << fb::num_str(row.diff)
              << " ci=" << fb::num_str(row.combined_half_width)
              << (row.within ? " (within)" : " (outside)") << "\n";
  std::cout << "wrote " << files << "\n";
  return 0;
}

int cmd_truncation(double alpha, int n, double x, double delta, const EstimatorFlags& est,
                   const OutputOptions& out) {
  const auto rep = fb::run_truncation(alpha, n, x, delta, est.spec());
  const json doc = {{"version", fb::kVersion},
                    {"command", "truncation"},
                    {"args",
                     {{"alpha", alpha},
                      {"n", n},
                      {"x", x},
                      {"delta", delta},
                      {"estimator", est.echo()}}},
                    {"report", fb::to_json(rep)}};
  const std::string files = out.emit("truncation", doc, fb::csv_table(rep));

  std::cout << "x=" << fb::num_str(x) << " delta=" << fb::num_str(delta)
            << ": full=" << fb::num_str(rep.full.point)
            << " truncated=" << fb::num_str(rep.truncated.point)
            << " discrepancy=" << fb::num_str(rep.discrepancy) << " +/- "
            << fb::num_str(rep.discrepancy_half_width) << "\n";
  std::cout << "wrote " << files << "\n";
  return 0;
}

int cmd_constants(std::optional<int> d, std::optional<int> m) {
  std::cout << "d,m,c1,c2\n";
  const auto row = [](int dd, int mm) {
    const auto [c1, c2] = fb::constants(dd, mm);
    std::cout << dd << ',' << mm << ',' << fb::num_str(c1) << ',' << fb::num_str(c2) << "\n";
  };
  if (d && m) {
    row(*d, *m);
  } else {
    for (int dd = 1; dd <= 3; ++dd)
      for (int mm = 0; mm <= 2; ++mm) row(dd, mm);
  }
  return 0;
}

int cmd_boundary(const std::string& config_path) {
  const json cfg = load_config(config_path);
  if (!cfg.is_object()) throw fb::ConfigError("config: top level must be a JSON object");
  if (!cfg.contains("lambda")) throw fb::ConfigError("config: missing field $.lambda");
  if (!cfg.contains("m")) throw fb::ConfigError("config: missing field $.m");
  const auto lambda = fb::parse_sites(cfg["lambda"], "lambda");
  if (!cfg["m"].is_number_integer() || cfg["m"].get<int64_t>() < 0)
    throw fb::ConfigError("config: m must be a non-negative integer");
  const int m = static_cast<int>(cfg["m"].get<int64_t>());
  if (lambda.empty()) throw fb::ConfigError("config: lambda must be non-empty");

  const auto [c1, c2] = fb::constants(lambda.dim(), m);
  const auto win = fb::window(lambda, m);
  const auto outer = fb::boundary_outer(lambda, m);
  const auto inner = fb::boundary_inner(lambda, m);
  std::cout << "d=" << lambda.dim() << " m=" << m << " |lambda|=" << lambda.size()
            << " |window|=" << win.size() << " c1=" << fb::num_str(c1)
            << " c2=" << fb::num_str(c2) << "\n";
  std::cout << "far ordered pairs: " << fb::far_pair_count(lambda, m) << "\n";
  if (outer.empty() && inner.empty()) {
    std::cout << "boundary: (empty)\n";
    return 0;
  }
  std::cout << "boundary: " << outer.size() + inner.size() << " sites\n";
  for (const auto& p : outer) std::cout << "  outer " << fb::to_string(p) << "\n";
  for (const auto& p : inner) std::cout << "  inner " << fb::to_string(p) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block-approximation bounds for lattice random fields"};
  app.require_subcommand(1);

  // verify
  auto* verify = app.add_subcommand("verify", "Check the bound for a configured instance");
  std::string verify_config;
  OutputOptions verify_out;
  bool pointwise = false;
  std::optional<uint64_t> seed_override, samples_override;
  std::optional<unsigned> threads_override;
  verify->add_option("--config", verify_config, "JSON config file")->required();
  add_output_flags(verify, verify_out);
  verify->add_flag("--pointwise", pointwise, "Also check the outcome-level inequality");
  verify->add_option("--seed", seed_override, "Override the mc seed");
  verify->add_option("--samples", samples_override, "Override the mc sample count");
  verify->add_option("--threads", threads_override, "Override worker threads");

  // compound-poisson
  auto* cp = app.add_subcommand("compound-poisson",
                                "Cluster-count bound: P(K=k) vs the block approximation");
  double cp_rate = 1.0;
  int cp_n = 16, cp_m = 1, cp_kmax = 3;
  EstimatorFlags cp_est;
  OutputOptions cp_out;
  cp->add_option("--rate", cp_rate, "Cluster rate; p_n = sqrt(rate/n)");
  cp->add_option("--n", cp_n, "Number of sites");
  cp->add_option("--m", cp_m, "Dependence range (the field is 1-dependent)");
  cp->add_option("--kmax", cp_kmax, "Check k = 1..kmax");
  add_estimator_flags(cp, cp_est);
  add_output_flags(cp, cp_out);

  // large-dev
  auto* ld = app.add_subcommand("large-dev",
                                "Heavy-tail scaling: u(x) vs the block-difference form v(x)");
  double ld_alpha = 0.8;
  int ld_n = 1000;
  std::optional<int> ld_m;
  std::string ld_dep = "iid";
  std::vector<double> ld_x;
  EstimatorFlags ld_est;
  OutputOptions ld_out;
  ld->add_option("--alpha", ld_alpha, "Pareto tail index, in (0,1)");
  ld->add_option("--n", ld_n, "Number of sites");
  ld->add_option("--dep", ld_dep, "Dependence: iid or moving (X_i = Y_i + Y_{i+1})");
  ld->add_option("--m", ld_m, "Override the block size m");
  ld->add_option("--x", ld_x, "Levels x (default 5 10)");
  add_estimator_flags(ld, ld_est);
  add_output_flags(ld, ld_out);

  // truncation
  auto* tr = app.add_subcommand("truncation",
                                "Small-value truncation discrepancy of the scaled sum");
  double tr_alpha = 0.8, tr_x = 10.0, tr_delta = 0.05;
  int tr_n = 1000;
  EstimatorFlags tr_est;
  OutputOptions tr_out;
  tr->add_option("--alpha", tr_alpha, "Pareto tail index, in (0,1)");
  tr->add_option("--n", tr_n, "Number of sites");
  tr->add_option("--x", tr_x, "Level x");
  tr->add_option("--delta", tr_delta, "Truncation fraction in (0,1]");
  add_estimator_flags(tr, tr_est);
  add_output_flags(tr, tr_out);

  // constants
  auto* cn = app.add_subcommand("constants", "Print the scaling constants c1, c2");
  std::optional<int> cn_d, cn_m;
  cn->add_option("--d", cn_d, "Dimension (with --m; otherwise a small table is printed)");
  cn->add_option("--m", cn_m, "Block size");

  // boundary
  auto* bd = app.add_subcommand("boundary", "Print boundary sites and pair counts for lambda");
  std::string bd_config;
  bd->add_option("--config", bd_config, "JSON config with lambda and m")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (verify->parsed())
      return cmd_verify(verify_config, verify_out, pointwise, seed_override, samples_override,
                        threads_override);
    if (cp->parsed()) return cmd_compound_poisson(cp_rate, cp_n, cp_m, cp_kmax, cp_est, cp_out);
    if (ld->parsed()) return cmd_large_dev(ld_alpha, ld_n, ld_m, ld_dep, ld_x, ld_est, ld_out);
    if (tr->parsed()) return cmd_truncation(tr_alpha, tr_n, tr_x, tr_delta, tr_est, tr_out);
    if (cn->parsed()) return cmd_constants(cn_d, cn_m);
    if (bd->parsed()) return cmd_boundary(bd_config);
  } catch (const fb::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
