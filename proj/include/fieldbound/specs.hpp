#pragma once

#include <string>

#include "fieldbound/estimate.hpp"
#include "fieldbound/events.hpp"
#include "fieldbound/fields.hpp"
#include "fieldbound/lattice.hpp"
#include "json.hpp"

namespace fieldbound {

// Parsers from the JSON config schema to library objects. All throw
// ConfigError with the path of the offending field.

Marginal<double> parse_marginal(const nlohmann::json& j, const std::string& path);
FieldModel<double> parse_model(const nlohmann::json& j, const std::string& path);
TargetSet<double> parse_target(const nlohmann::json& j, const std::string& path);
AnyFamily<double> parse_family(const nlohmann::json& j, const std::string& path);
SiteSet parse_sites(const nlohmann::json& j, const std::string& path);

struct EstimatorSpec {
  bool exact = true;
  ExactOptions exact_opt;
  McOptions mc_opt{1, 0};

  Estimator<double> build(const FieldModel<double>& model, const SiteSet& win) const {
    return exact ? Estimator<double>::exact(model, win, exact_opt)
                 : Estimator<double>::monte_carlo(model, win, mc_opt);
  }
};
EstimatorSpec parse_estimator(const nlohmann::json& j, const std::string& path);

struct VerifyConfig {
  FieldModel<double> model;
  AnyFamily<double> family;
  SiteSet lambda;
  int m = 1;
  EstimatorSpec estimator;
  bool pointwise = false;
};
VerifyConfig parse_verify_config(const nlohmann::json& j);

}  // namespace fieldbound
