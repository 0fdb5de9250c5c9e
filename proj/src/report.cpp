#include "fieldbound/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

namespace fieldbound {

nlohmann::json to_json(const MeanEstimate& e) {
  return {{"point", e.point}, {"half_width", e.half_width}, {"n", e.n}};
}

nlohmann::json to_json(const ProbEstimate& e) {
  return {{"point", e.point}, {"half_width", e.half_width}, {"n", e.n},
          {"lo", e.lo()},     {"hi", e.hi()}};
}

nlohmann::json to_json(const BoundReport& r) {
  return {{"d", r.d},
          {"m", r.m},
          {"lambda_size", r.lambda_size},
          {"family", r.family},
          {"model", r.model},
          {"backend", r.backend},
          {"n", r.n},
          {"seed", r.seed},
          {"confidence", r.confidence},
          {"exact", r.exact_backend},
          {"target", to_json(r.target)},
          {"approx", to_json(r.approx)},
          {"error", r.error},
          {"error_half_width", r.error_half_width},
          {"c1", r.c1},
          {"c2", r.c2},
          {"boundary_sum", to_json(r.boundary_sum)},
          {"pair_sum", to_json(r.pair_sum)},
          {"boundary_term", r.boundary_term},
          {"boundary_half_width", r.boundary_half_width},
          {"pair_term", r.pair_term},
          {"pair_half_width", r.pair_half_width},
          {"boundary_size", r.boundary_size},
          {"far_pair_count", r.far_pair_count},
          {"bound", r.bound},
          {"bound_half_width", r.bound_half_width},
          {"slack", r.slack},
          {"verdict", to_string(r.verdict)},
          {"pointwise",
           {{"ran", r.pointwise_ran},
            {"checked", r.pointwise_checked},
            {"violations", r.pointwise_violations}}}};
}

nlohmann::json to_json(const Theorem1Report& r) {
  return {{"n", r.n},
          {"m", r.m},
          {"target", to_json(r.target)},
          {"block_long", to_json(r.block_long)},
          {"block_short", to_json(r.block_short)},
          {"approx", r.approx},
          {"approx_half_width", r.approx_half_width},
          {"error", r.error},
          {"error_half_width", r.error_half_width},
          {"cluster", to_json(r.cluster)},
          {"pair_sum", to_json(r.pair_sum)},
          {"bound", r.bound},
          {"bound_half_width", r.bound_half_width},
          {"verdict", to_string(r.verdict)}};
}

std::string num_str(double v) { return nlohmann::json(v).dump(); }

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_header() {
  return "d,m,lambda_size,family,model,target,approx,error,boundary_term,pair_term,slack,"
         "verdict";
}

std::string csv_row(const BoundReport& r) {
  std::string s;
  s += std::to_string(r.d) + ',';
  s += std::to_string(r.m) + ',';
  s += std::to_string(r.lambda_size) + ',';
  s += csv_escape(r.family) + ',';
  s += csv_escape(r.model) + ',';
  s += num_str(r.target.point) + ',';
  s += num_str(r.approx.point) + ',';
  s += num_str(r.error) + ',';
  s += num_str(r.boundary_term) + ',';
  s += num_str(r.pair_term) + ',';
  s += num_str(r.slack) + ',';
  s += to_string(r.verdict);
  return s;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp + " for writing");
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("rename failed: " + tmp + " -> " + path);
}

}  // namespace fieldbound
