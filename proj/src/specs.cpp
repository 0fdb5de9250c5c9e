#include "fieldbound/specs.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "fieldbound/errors.hpp"

namespace fieldbound {

namespace {

using nlohmann::json;

const json& need(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw ConfigError("config: " + path + " must be an object");
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError("config: missing field " + path + "." + key);
  return *it;
}

std::string need_str(const json& j, const char* key, const std::string& path) {
  const json& v = need(j, key, path);
  if (!v.is_string()) throw ConfigError("config: " + path + "." + key + " must be a string");
  return v.get<std::string>();
}

double as_num(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw ConfigError("config: " + where + " must be a number");
}

double need_num(const json& j, const char* key, const std::string& path) {
  return as_num(need(j, key, path), path + "." + key);
}

int64_t need_int(const json& j, const char* key, const std::string& path) {
  const json& v = need(j, key, path);
  if (!v.is_number_integer())
    throw ConfigError("config: " + path + "." + key + " must be an integer");
  return v.get<int64_t>();
}

int64_t opt_int(const json& j, const char* key, const std::string& path, int64_t dflt) {
  if (!j.is_object() || j.find(key) == j.end()) return dflt;
  return need_int(j, key, path);
}

double opt_num(const json& j, const char* key, const std::string& path, double dflt) {
  if (!j.is_object() || j.find(key) == j.end()) return dflt;
  return need_num(j, key, path);
}

SitePoint parse_point(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty())
    throw ConfigError("config: " + where + " must be a non-empty array of integers");
  SitePoint p;
  for (const auto& c : v) {
    if (!c.is_number_integer())
      throw ConfigError("config: " + where + " must contain integers only");
    p.coords.push_back(static_cast<int32_t>(c.get<int64_t>()));
  }
  return p;
}

}  // namespace

Marginal<double> parse_marginal(const json& j, const std::string& path) {
  const std::string type = need_str(j, "type", path);
  try {
    if (type == "bernoulli") return Marginal<double>::bernoulli(need_num(j, "p", path));
    if (type == "pareto") return Marginal<double>::pareto(need_num(j, "alpha", path));
    if (type == "table") {
      const json& entries = need(j, "entries", path);
      if (!entries.is_array() || entries.empty())
        throw ConfigError("config: " + path + ".entries must be a non-empty array");
      std::vector<double> values, probs;
      for (size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        const std::string where = path + ".entries[" + std::to_string(i) + "]";
        if (!e.is_array() || e.size() != 2)
          throw ConfigError("config: " + where + " must be a [value, prob] pair");
        values.push_back(as_num(e[0], where + "[0]"));
        probs.push_back(as_num(e[1], where + "[1]"));
      }
      return Marginal<double>::table(std::move(values), std::move(probs));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  throw ConfigError("config: " + path + ".type must be bernoulli, table, or pareto");
}

SiteSet parse_sites(const json& j, const std::string& path) {
  if (j.is_object() && j.contains("box")) {
    const json& box = j["box"];
    if (!box.is_array() || box.empty())
      throw ConfigError("config: " + path + ".box must be a non-empty array of [lo, hi]");
    std::vector<std::pair<int32_t, int32_t>> extents;
    for (size_t k = 0; k < box.size(); ++k) {
      const auto& e = box[k];
      const std::string where = path + ".box[" + std::to_string(k) + "]";
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
          !e[1].is_number_integer())
        throw ConfigError("config: " + where + " must be an integer pair [lo, hi]");
      const auto lo = e[0].get<int64_t>(), hi = e[1].get<int64_t>();
      if (lo > hi) throw ConfigError("config: " + where + " must satisfy lo <= hi");
      extents.emplace_back(static_cast<int32_t>(lo), static_cast<int32_t>(hi));
    }
    return SiteSet::box(extents);
  }
  if (j.is_object() && j.contains("points")) {
    const json& pts = j["points"];
    if (!pts.is_array() || pts.empty())
      throw ConfigError("config: " + path + ".points must be a non-empty array");
    std::vector<SitePoint> out;
    for (size_t i = 0; i < pts.size(); ++i)
      out.push_back(parse_point(pts[i], path + ".points[" + std::to_string(i) + "]"));
    try {
      return SiteSet(std::move(out));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("config: " + path + ".points: " + e.what());
    }
  }
  throw ConfigError("config: " + path + " must contain either \"box\" or \"points\"");
}

FieldModel<double> parse_model(const json& j, const std::string& path) {
  const std::string kind = need_str(j, "kind", path);
  try {
    if (kind == "iid") return FieldModel<double>::iid(parse_marginal(need(j, "marginal", path), path + ".marginal"));
    if (kind == "moving") {
      const auto marg = parse_marginal(need(j, "marginal", path), path + ".marginal");
      const json& offs = need(j, "offsets", path);
      if (!offs.is_array() || offs.empty())
        throw ConfigError("config: " + path + ".offsets must be a non-empty array of points");
      std::vector<SitePoint> pts;
      for (size_t i = 0; i < offs.size(); ++i)
        pts.push_back(parse_point(offs[i], path + ".offsets[" + std::to_string(i) + "]"));
      const std::string comb = need_str(j, "combiner", path);
      Combiner c;
      if (comb == "sum") c = Combiner::Sum;
      else if (comb == "max") c = Combiner::Max;
      else if (comb == "product") c = Combiner::Product;
      else if (comb == "all_ones") c = Combiner::AllOnes;
      else
        throw ConfigError("config: " + path +
                          ".combiner must be sum, max, product, or all_ones");
      return FieldModel<double>::moving(marg, SiteSet(std::move(pts)), c);
    }
    if (kind == "explicit") {
      const SiteSet win = parse_sites(need(j, "window", path), path + ".window");
      const json& rows = need(j, "rows", path);
      if (!rows.is_array() || rows.empty())
        throw ConfigError("config: " + path + ".rows must be a non-empty array");
      std::vector<std::pair<double, std::vector<double>>> table;
      for (size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const std::string where = path + ".rows[" + std::to_string(i) + "]";
        if (!row.is_array() || row.size() != 2 || !row[1].is_array())
          throw ConfigError("config: " + where + " must be [prob, [values...]]");
        std::vector<double> vals;
        for (size_t k = 0; k < row[1].size(); ++k)
          vals.push_back(as_num(row[1][k], where + "[1][" + std::to_string(k) + "]"));
        table.emplace_back(as_num(row[0], where + "[0]"), std::move(vals));
      }
      const auto range = need_int(j, "range", path);
      return FieldModel<double>::explicit_table(win, std::move(table),
                                                static_cast<int>(range));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  throw ConfigError("config: " + path + ".kind must be iid, moving, or explicit");
}

TargetSet<double> parse_target(const json& j, const std::string& path) {
  const std::string type = need_str(j, "type", path);
  try {
    if (type == "interval") {
      const double lo = need_num(j, "lo", path);
      const double hi = opt_num(j, "hi", path, std::numeric_limits<double>::infinity());
      return TargetSet<double>::interval(lo, hi);
    }
    if (type == "point_set") {
      const json& vals = need(j, "values", path);
      if (!vals.is_array() || vals.empty())
        throw ConfigError("config: " + path + ".values must be a non-empty array");
      std::vector<double> out;
      for (size_t i = 0; i < vals.size(); ++i)
        out.push_back(as_num(vals[i], path + ".values[" + std::to_string(i) + "]"));
      return TargetSet<double>::points(std::move(out));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  throw ConfigError("config: " + path + ".type must be interval or point_set");
}

AnyFamily<double> parse_family(const json& j, const std::string& path) {
  const std::string kind = need_str(j, "family", path);
  const auto target = parse_target(need(j, "target", path), path + ".target");
  try {
    if (kind == "sum") return AnyFamily<double>(SumFamily<double>(target));
    if (kind == "union") return AnyFamily<double>(UnionFamily<double>(target));
    if (kind == "product") return AnyFamily<double>(ProductFamily<double>(target));
    if (kind == "semigroup") {
      const std::string order =
          j.contains("order") ? need_str(j, "order", path) : std::string("lex");
      SiteOrder o;
      if (order == "lex") o = SiteOrder::LexAscending;
      else if (order == "lex-desc") o = SiteOrder::LexDescending;
      else
        throw ConfigError("config: " + path + ".order must be lex or lex-desc");
      return AnyFamily<double>(SemigroupFamily<double>(target, 1.0, o));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  throw ConfigError("config: " + path + ".family must be sum, union, product, or semigroup");
}

EstimatorSpec parse_estimator(const json& j, const std::string& path) {
  const std::string backend = need_str(j, "backend", path);
  EstimatorSpec spec;
  if (backend == "exact") {
    spec.exact = true;
    const auto cap = opt_int(j, "cap", path, static_cast<int64_t>(kDefaultEnumerationCap));
    if (cap < 1) throw ConfigError("config: " + path + ".cap must be >= 1");
    spec.exact_opt.cap = static_cast<uint64_t>(cap);
    const auto threads = opt_int(j, "threads", path, 0);
    if (threads < 0) throw ConfigError("config: " + path + ".threads must be >= 0");
    spec.exact_opt.threads = static_cast<unsigned>(threads);
    return spec;
  }
  if (backend == "mc") {
    spec.exact = false;
    const auto n = need_int(j, "n_samples", path);
    if (n < 1) throw ConfigError("config: " + path + ".n_samples must be >= 1");
    spec.mc_opt.n_samples = static_cast<uint64_t>(n);
    spec.mc_opt.seed = static_cast<uint64_t>(opt_int(j, "seed", path, 0));
    spec.mc_opt.confidence = opt_num(j, "confidence", path, 0.99);
    if (!(spec.mc_opt.confidence > 0.0 && spec.mc_opt.confidence < 1.0))
      throw ConfigError("config: " + path + ".confidence must lie in (0,1)");
    const auto threads = opt_int(j, "threads", path, 0);
    if (threads < 0) throw ConfigError("config: " + path + ".threads must be >= 0");
    spec.mc_opt.threads = static_cast<unsigned>(threads);
    return spec;
  }
  throw ConfigError("config: " + path + ".backend must be exact or mc");
}

VerifyConfig parse_verify_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  auto model = parse_model(need(j, "model", "$"), "model");
  auto family = parse_family(need(j, "family", "$"), "family");
  auto lambda = parse_sites(need(j, "lambda", "$"), "lambda");
  const auto m = need_int(j, "m", "$");
  if (m < 0) throw ConfigError("config: m must be >= 0");
  if (j.contains("d")) {
    const auto d = need_int(j, "d", "$");
    if (d != lambda.dim())
      throw ConfigError("config: d = " + std::to_string(d) +
                        " does not match lambda dimension " + std::to_string(lambda.dim()));
  }
  auto est = parse_estimator(need(j, "estimator", "$"), "estimator");
  bool pw = false;
  if (j.contains("pointwise")) {
    if (!j["pointwise"].is_boolean()) throw ConfigError("config: pointwise must be a boolean");
    pw = j["pointwise"].get<bool>();
  }
  return VerifyConfig{std::move(model), std::move(family), std::move(lambda),
                      static_cast<int>(m), est, pw};
}

}  // namespace fieldbound
