#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "fieldbound/errors.hpp"
#include "fieldbound/lattice.hpp"
#include "fieldbound/rng.hpp"

namespace fieldbound {

// One-site distribution: a finite table of (value, probability) or Pareto(alpha)
// on [1, inf) with density alpha * x^(-alpha-1).
template <class T>
class Marginal {
 public:
  enum class Kind { Table, Pareto };

  static Marginal table(std::vector<T> values, std::vector<double> probs) {
    if (values.empty() || values.size() != probs.size())
      throw std::invalid_argument("marginal table: values/probs must be non-empty and equal length");
    double sum = 0.0;
    for (double p : probs) {
      if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("marginal table: probabilities must lie in [0,1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("marginal table: probabilities must sum to 1");
    Marginal m;
    m.kind_ = Kind::Table;
    m.values_ = std::move(values);
    m.probs_ = std::move(probs);
    m.cum_.resize(m.probs_.size());
    double c = 0.0;
    for (size_t i = 0; i < m.probs_.size(); ++i) {
      c += m.probs_[i];
      m.cum_[i] = c;
    }
    return m;
  }

  static Marginal point_mass(T v) { return table({std::move(v)}, {1.0}); }

  static Marginal bernoulli(double p) {
    static_assert(std::is_same_v<T, double>, "bernoulli marginal is double-valued");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bernoulli: p must lie in [0,1]");
    return table({0.0, 1.0}, {1.0 - p, p});
  }

  static Marginal pareto(double alpha) {
    static_assert(std::is_same_v<T, double>, "pareto marginal is double-valued");
    if (!(alpha > 0.0)) throw std::invalid_argument("pareto: alpha must be > 0");
    Marginal m;
    m.kind_ = Kind::Pareto;
    m.alpha_ = alpha;
    return m;
  }

  Kind kind() const { return kind_; }
  bool finite() const { return kind_ == Kind::Table; }
  size_t alphabet_size() const { return values_.size(); }
  const std::vector<T>& values() const { return values_; }
  const std::vector<double>& probs() const { return probs_; }
  double alpha() const { return alpha_; }

  // Inverse-CDF draw from one 64-bit word.
  T draw(uint64_t word) const {
    const double u = rng::to_unit(word);
    if (kind_ == Kind::Pareto) {
      if constexpr (std::is_same_v<T, double>)
        return std::exp(-std::log1p(-u) / alpha_);
      else
        throw std::logic_error("pareto draw on non-double type");
    }
    size_t i = 0;
    while (i + 1 < cum_.size() && u >= cum_[i]) ++i;
    return values_[i];
  }

  std::string describe() const {
    char buf[64];
    if (kind_ == Kind::Pareto) {
      std::snprintf(buf, sizeof buf, "pareto(%g)", alpha_);
      return buf;
    }
    if constexpr (std::is_same_v<T, double>) {
      if (values_.size() == 2 && values_[0] == 0.0 && values_[1] == 1.0) {
        std::snprintf(buf, sizeof buf, "bernoulli(%g)", probs_[1]);
        return buf;
      }
      std::string s = "table{";
      for (size_t i = 0; i < values_.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s%g:%g", i ? "," : "", values_[i], probs_[i]);
        s += buf;
      }
      return s + "}";
    } else {
      std::snprintf(buf, sizeof buf, "table<%zu>", values_.size());
      return buf;
    }
  }

 private:
  Kind kind_ = Kind::Table;
  std::vector<T> values_;
  std::vector<double> probs_;
  std::vector<double> cum_;
  double alpha_ = 0.0;
};

enum class Combiner { Sum, Max, Product, AllOnes };

inline const char* to_string(Combiner c) {
  switch (c) {
    case Combiner::Sum: return "sum";
    case Combiner::Max: return "max";
    case Combiner::Product: return "product";
    case Combiner::AllOnes: return "all_ones";
  }
  return "?";
}

namespace detail {

template <class T>
constexpr bool combiner_supported(Combiner c) {
  switch (c) {
    case Combiner::Sum: return requires(T a, T b) { a = a + b; };
    case Combiner::Product: return requires(T a, T b) { a = a * b; };
    case Combiner::Max: return requires(T a, T b) { a < b; };
    case Combiner::AllOnes: return requires(T a) { a == T(1); T(0); };
  }
  return false;
}

template <class T>
T combine(Combiner c, const T* vals, const int32_t* idx, size_t n) {
  switch (c) {
    case Combiner::Sum:
      if constexpr (requires(T a, T b) { a = a + b; }) {
        T acc = vals[idx[0]];
        for (size_t i = 1; i < n; ++i) acc = acc + vals[idx[i]];
        return acc;
      }
      break;
    case Combiner::Product:
      if constexpr (requires(T a, T b) { a = a * b; }) {
        T acc = vals[idx[0]];
        for (size_t i = 1; i < n; ++i) acc = acc * vals[idx[i]];
        return acc;
      }
      break;
    case Combiner::Max:
      if constexpr (requires(T a, T b) { a < b; }) {
        T acc = vals[idx[0]];
        for (size_t i = 1; i < n; ++i)
          if (acc < vals[idx[i]]) acc = vals[idx[i]];
        return acc;
      }
      break;
    case Combiner::AllOnes:
      if constexpr (requires(T a) { a == T(1); T(0); }) {
        for (size_t i = 0; i < n; ++i)
          if (!(vals[idx[i]] == T(1))) return T(0);
        return T(1);
      }
      break;
  }
  throw std::logic_error("combiner unsupported for this value type");
}

}  // namespace detail

// Joint law of the field restricted to a finite window. Either iid noise, a
// moving transform Z_t = combine(Y_{t+o} : o in offsets) of iid noise, or an
// explicit finite table of outcomes.
template <class T>
class FieldModel {
 public:
  enum class Kind { Iid, Moving, Explicit };

  static FieldModel iid(Marginal<T> m) {
    FieldModel f;
    f.kind_ = Kind::Iid;
    f.marginal_ = std::move(m);
    return f;
  }

  static FieldModel moving(Marginal<T> base, SiteSet offsets, Combiner comb) {
    if (offsets.empty()) throw std::invalid_argument("moving model: offsets must be non-empty");
    if (!detail::combiner_supported<T>(comb))
      throw std::invalid_argument("moving model: combiner unsupported for value type");
    FieldModel f;
    f.kind_ = Kind::Moving;
    f.marginal_ = std::move(base);
    f.offsets_ = std::move(offsets);
    f.combiner_ = comb;
    return f;
  }

  static FieldModel explicit_table(SiteSet window,
                                   std::vector<std::pair<double, std::vector<T>>> rows,
                                   int declared_range) {
    if (window.empty()) throw std::invalid_argument("explicit model: empty window");
    if (rows.empty()) throw std::invalid_argument("explicit model: no rows");
    if (declared_range < 0) throw std::invalid_argument("explicit model: negative range");
    double sum = 0.0;
    for (const auto& [p, vals] : rows) {
      if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("explicit model: probabilities must lie in [0,1]");
      if (vals.size() != window.size())
        throw std::invalid_argument("explicit model: row width != window size");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("explicit model: probabilities must sum to 1");
    FieldModel f;
    f.kind_ = Kind::Explicit;
    f.explicit_window_ = std::move(window);
    f.rows_ = std::move(rows);
    f.declared_range_ = declared_range;
    f.row_cum_.resize(f.rows_.size());
    double c = 0.0;
    for (size_t i = 0; i < f.rows_.size(); ++i) {
      c += f.rows_[i].first;
      f.row_cum_[i] = c;
    }
    return f;
  }

  Kind kind() const { return kind_; }
  const Marginal<T>& marginal() const { return marginal_; }
  const SiteSet& offsets() const { return offsets_; }
  Combiner combiner() const { return combiner_; }
  const SiteSet& explicit_window() const { return explicit_window_; }
  const std::vector<std::pair<double, std::vector<T>>>& rows() const { return rows_; }
  const std::vector<double>& row_cum() const { return row_cum_; }

  // Chebyshev radius beyond which sites are independent: 0 for iid, the
  // largest per-axis offset spread for moving transforms, declared for
  // explicit tables.
  int dependence_range() const {
    switch (kind_) {
      case Kind::Iid: return 0;
      case Kind::Moving: {
        int r = 0;
        for (int k = 0; k < offsets_.dim(); ++k) {
          int32_t lo = offsets_[0][k], hi = offsets_[0][k];
          for (const auto& o : offsets_) {
            lo = std::min(lo, o[k]);
            hi = std::max(hi, o[k]);
          }
          r = std::max(r, hi - lo);
        }
        return r;
      }
      case Kind::Explicit: return declared_range_;
    }
    return 0;
  }

  std::string describe() const {
    switch (kind_) {
      case Kind::Iid: return "iid:" + marginal_.describe();
      case Kind::Moving: {
        char buf[48];
        std::snprintf(buf, sizeof buf, "moving[%s,r=%d]:", to_string(combiner_), dependence_range());
        return buf + marginal_.describe();
      }
      case Kind::Explicit: {
        char buf[48];
        std::snprintf(buf, sizeof buf, "explicit[%zu rows,r=%d]", rows_.size(), declared_range_);
        return buf;
      }
    }
    return "?";
  }

 private:
  Kind kind_ = Kind::Iid;
  Marginal<T> marginal_ = Marginal<T>::table({T{}}, {1.0});
  SiteSet offsets_;
  Combiner combiner_ = Combiner::Sum;
  SiteSet explicit_window_;
  std::vector<std::pair<double, std::vector<T>>> rows_;
  std::vector<double> row_cum_;
  int declared_range_ = 0;
};

// Field values on a finite support, aligned with the support's site order.
template <class T>
struct FieldSample {
  SiteSet support;
  std::vector<T> values;

  const T& at(const SitePoint& p) const {
    const std::ptrdiff_t i = support.index_of(p);
    if (i < 0) throw SupportError("sample does not cover site " + to_string(p));
    return values[static_cast<size_t>(i)];
  }
};

template <class T>
struct WeightedOutcome {
  FieldSample<T> sample;
  double probability = 0.0;
};

// Precomputed keys and gather lists for drawing a model repeatedly on one window.
template <class T>
class SamplePlan {
 public:
  SamplePlan(const FieldModel<T>& model, const SiteSet& win) : model_(model) {
    if (win.empty()) throw std::invalid_argument("sample plan: empty window");
    window_ = win;
    switch (model.kind()) {
      case FieldModel<T>::Kind::Iid:
        noise_sites_ = win;
        break;
      case FieldModel<T>::Kind::Moving: {
        if (model.offsets().dim() != win.dim())
          throw std::invalid_argument("moving model offsets dimension != window dimension");
        noise_sites_ = dilate(win, model.offsets());
        gather_off_.reserve(win.size() + 1);
        gather_off_.push_back(0);
        for (const auto& t : win) {
          for (const auto& o : model.offsets()) {
            const std::ptrdiff_t j = noise_sites_.index_of(t + o);
            gather_idx_.push_back(static_cast<int32_t>(j));
          }
          gather_off_.push_back(static_cast<int32_t>(gather_idx_.size()));
        }
        break;
      }
      case FieldModel<T>::Kind::Explicit: {
        for (const auto& t : win) {
          const std::ptrdiff_t j = model.explicit_window().index_of(t);
          if (j < 0)
            throw SupportError("explicit model does not cover site " + to_string(t));
          proj_.push_back(static_cast<int32_t>(j));
        }
        break;
      }
    }
    noise_keys_.reserve(noise_sites_.size());
    for (const auto& s : noise_sites_) noise_keys_.push_back(rng::site_key(s));
  }

  const SiteSet& window() const { return window_; }
  const SiteSet& noise_sites() const { return noise_sites_; }

  // out.values gets the field on the window; noise_buf is caller scratch.
  void sample_into(std::vector<T>& out, std::vector<T>& noise_buf, uint64_t seed,
                   uint64_t index) const {
    const uint64_t base = rng::stream_base(seed, index);
    out.resize(window_.size());
    switch (model_.kind()) {
      case FieldModel<T>::Kind::Iid: {
        const auto& m = model_.marginal();
        for (size_t i = 0; i < out.size(); ++i)
          out[i] = m.draw(rng::draw_u64(base, noise_keys_[i]));
        break;
      }
      case FieldModel<T>::Kind::Moving: {
        const auto& m = model_.marginal();
        noise_buf.resize(noise_sites_.size());
        for (size_t i = 0; i < noise_buf.size(); ++i)
          noise_buf[i] = m.draw(rng::draw_u64(base, noise_keys_[i]));
        const Combiner c = model_.combiner();
        for (size_t i = 0; i < out.size(); ++i) {
          const int32_t b = gather_off_[i], e = gather_off_[i + 1];
          out[i] = detail::combine(c, noise_buf.data(), gather_idx_.data() + b,
                                   static_cast<size_t>(e - b));
        }
        break;
      }
      case FieldModel<T>::Kind::Explicit: {
        const double u = rng::to_unit(rng::draw_u64(base, 0x8F1BBCDC4B2C8E6Dull));
        const auto& cum = model_.row_cum();
        size_t r = 0;
        while (r + 1 < cum.size() && u >= cum[r]) ++r;
        const auto& row = model_.rows()[r].second;
        for (size_t i = 0; i < out.size(); ++i)
          out[i] = row[static_cast<size_t>(proj_[i])];
        break;
      }
    }
  }

  const std::vector<int32_t>& gather_offsets() const { return gather_off_; }
  const std::vector<int32_t>& gather_indices() const { return gather_idx_; }
  const std::vector<int32_t>& projection() const { return proj_; }

 private:
  FieldModel<T> model_;
  SiteSet window_;
  SiteSet noise_sites_;
  std::vector<uint64_t> noise_keys_;
  std::vector<int32_t> gather_off_, gather_idx_;  // moving
  std::vector<int32_t> proj_;                     // explicit
};

// Draw the field on a window. Pure in (model, window, seed, index).
template <class T>
FieldSample<T> sample(const FieldModel<T>& model, const SiteSet& win, uint64_t seed,
                      uint64_t index) {
  SamplePlan<T> plan(model, win);
  FieldSample<T> out;
  out.support = win;
  std::vector<T> scratch;
  plan.sample_into(out.values, scratch, seed, index);
  return out;
}

inline constexpr uint64_t kDefaultEnumerationCap = uint64_t{1} << 24;

// Streams every outcome of the window's joint law in a fixed mixed-radix order
// (noise sites sorted, last site fastest). Probabilities come from one running
// left-to-right prefix product, so any cursor path to an outcome yields
// bit-identical doubles.
template <class T>
class EnumerationPlan {
 public:
  EnumerationPlan(const FieldModel<T>& model, const SiteSet& win,
                  uint64_t cap = kDefaultEnumerationCap)
      : model_(model), plan_(model, win) {
    if (model.kind() != FieldModel<T>::Kind::Explicit && !model.marginal().finite())
      throw NonEnumerableError("non-enumerable marginal");
    if (model.kind() == FieldModel<T>::Kind::Explicit) {
      count_ = model.rows().size();
      radix_ = 1;
    } else {
      radix_ = static_cast<uint32_t>(model.marginal().alphabet_size());
      __uint128_t c = 1;
      for (size_t i = 0; i < plan_.noise_sites().size(); ++i) {
        c *= radix_;
        if (c > cap)
          throw EnumerationCapError(
              "state space too large: more than " + std::to_string(cap) + " outcomes");
      }
      count_ = static_cast<uint64_t>(c);
    }
    if (count_ > cap)
      throw EnumerationCapError(
          "state space too large: more than " + std::to_string(cap) + " outcomes");
    // scatter: which field sites a noise digit feeds
    if (model.kind() == FieldModel<T>::Kind::Moving) {
      scatter_off_.assign(plan_.noise_sites().size() + 1, 0);
      const auto& goff = plan_.gather_offsets();
      const auto& gidx = plan_.gather_indices();
      for (int32_t j : gidx) scatter_off_[static_cast<size_t>(j) + 1]++;
      for (size_t i = 1; i < scatter_off_.size(); ++i) scatter_off_[i] += scatter_off_[i - 1];
      scatter_idx_.resize(gidx.size());
      std::vector<int32_t> fill(scatter_off_.begin(), scatter_off_.end() - 1);
      for (size_t f = 0; f + 1 < goff.size(); ++f)
        for (int32_t g = goff[f]; g < goff[f + 1]; ++g)
          scatter_idx_[static_cast<size_t>(fill[static_cast<size_t>(gidx[static_cast<size_t>(g)])]++)] =
              static_cast<int32_t>(f);
    }
  }

  uint64_t outcome_count() const { return count_; }
  const SiteSet& window() const { return plan_.window(); }
  const SiteSet& noise_sites() const { return plan_.noise_sites(); }

  struct Cursor {
    std::vector<uint32_t> digits;
    std::vector<double> prefix;  // prefix[j] = P(digits[0..j-1]); prefix[0] = 1
    std::vector<T> noise;
    std::vector<T> field;
    double probability = 0.0;
    uint64_t pos = 0;
    std::vector<uint32_t> epoch;
    uint32_t epoch_cur = 0;
  };

  void seek(Cursor& cur, uint64_t index) const {
    const size_t K = digit_count();
    cur.digits.assign(K, 0);
    uint64_t rem = index;
    if (model_.kind() == FieldModel<T>::Kind::Explicit) {
      cur.digits[0] = static_cast<uint32_t>(rem);
    } else {
      for (size_t j = K; j-- > 0;) {
        cur.digits[j] = static_cast<uint32_t>(rem % radix_);
        rem /= radix_;
      }
    }
    cur.pos = index;
    cur.prefix.assign(K + 1, 1.0);
    cur.noise.resize(K);
    cur.epoch.assign(plan_.window().size(), 0);
    cur.epoch_cur = 0;
    recompute_from(cur, 0);
    refresh_all_fields(cur);
  }

  // Step to the next outcome. Prefix products are recomputed left-to-right
  // from the lowest changed digit, matching seek() bit for bit.
  void advance(Cursor& cur) const {
    ++cur.pos;
    if (cur.pos >= count_) return;
    if (model_.kind() == FieldModel<T>::Kind::Explicit) {
      cur.digits[0]++;
      recompute_from(cur, 0);
      refresh_all_fields(cur);
      return;
    }
    size_t j = cur.digits.size();
    while (j-- > 0) {
      if (cur.digits[j] + 1 < radix_) {
        cur.digits[j]++;
        for (size_t i = j + 1; i < cur.digits.size(); ++i) cur.digits[i] = 0;
        recompute_from(cur, j);
        if (model_.kind() == FieldModel<T>::Kind::Iid) {
          for (size_t i = j; i < cur.digits.size(); ++i) cur.field[i] = cur.noise[i];
        } else {
          // refresh each affected field site once
          ++cur.epoch_cur;
          for (size_t i = j; i < cur.digits.size(); ++i) {
            for (int32_t s = scatter_off_[i]; s < scatter_off_[i + 1]; ++s) {
              const int32_t f = scatter_idx_[static_cast<size_t>(s)];
              if (cur.epoch[static_cast<size_t>(f)] != cur.epoch_cur) {
                cur.epoch[static_cast<size_t>(f)] = cur.epoch_cur;
                refresh_field(cur, f);
              }
            }
          }
        }
        return;
      }
    }
  }

  // Outcome probability and field values for the cursor position.
  double probability(const Cursor& cur) const { return cur.probability; }
  const std::vector<T>& field(const Cursor& cur) const { return cur.field; }

 private:
  size_t digit_count() const {
    return model_.kind() == FieldModel<T>::Kind::Explicit ? 1 : plan_.noise_sites().size();
  }

  void recompute_from(Cursor& cur, size_t j) const {
    if (model_.kind() == FieldModel<T>::Kind::Explicit) {
      const auto& row = model_.rows()[cur.digits[0]];
      cur.probability = row.first;
      return;
    }
    const auto& vals = model_.marginal().values();
    const auto& probs = model_.marginal().probs();
    for (size_t i = j; i < cur.digits.size(); ++i) {
      cur.noise[i] = vals[cur.digits[i]];
      cur.prefix[i + 1] = cur.prefix[i] * probs[cur.digits[i]];
    }
    cur.probability = cur.prefix[cur.digits.size()];
  }

  void refresh_field(Cursor& cur, int32_t f) const {
    const auto& goff = plan_.gather_offsets();
    const auto& gidx = plan_.gather_indices();
    const int32_t b = goff[static_cast<size_t>(f)], e = goff[static_cast<size_t>(f) + 1];
    cur.field[static_cast<size_t>(f)] = detail::combine(
        model_.combiner(), cur.noise.data(), gidx.data() + b, static_cast<size_t>(e - b));
  }

  void refresh_all_fields(Cursor& cur) const {
    switch (model_.kind()) {
      case FieldModel<T>::Kind::Iid:
        cur.field = cur.noise;
        break;
      case FieldModel<T>::Kind::Moving:
        cur.field.resize(plan_.window().size());
        for (size_t f = 0; f < cur.field.size(); ++f)
          refresh_field(cur, static_cast<int32_t>(f));
        break;
      case FieldModel<T>::Kind::Explicit: {
        const auto& row = model_.rows()[cur.digits[0]].second;
        const auto& proj = plan_.projection();
        cur.field.resize(plan_.window().size());
        for (size_t i = 0; i < cur.field.size(); ++i)
          cur.field[i] = row[static_cast<size_t>(proj[i])];
        break;
      }
    }
  }

  FieldModel<T> model_;
  SamplePlan<T> plan_;
  uint64_t count_ = 0;
  uint32_t radix_ = 1;
  std::vector<int32_t> scatter_off_, scatter_idx_;
};

// Materialize the full outcome table (small windows; tests and oracles).
template <class T>
std::vector<WeightedOutcome<T>> enumerate_outcomes(const FieldModel<T>& model, const SiteSet& win,
                                                   uint64_t cap = kDefaultEnumerationCap) {
  EnumerationPlan<T> plan(model, win, cap);
  std::vector<WeightedOutcome<T>> out;
  out.reserve(plan.outcome_count());
  typename EnumerationPlan<T>::Cursor cur;
  plan.seek(cur, 0);
  for (uint64_t i = 0; i < plan.outcome_count(); ++i) {
    WeightedOutcome<T> w;
    w.sample.support = win;
    w.sample.values = plan.field(cur);
    w.probability = plan.probability(cur);
    out.push_back(std::move(w));
    plan.advance(cur);
  }
  return out;
}

}  // namespace fieldbound
