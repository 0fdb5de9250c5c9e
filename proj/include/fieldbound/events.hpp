#pragma once

#include <cstdio>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "fieldbound/errors.hpp"
#include "fieldbound/fields.hpp"
#include "fieldbound/lattice.hpp"

namespace fieldbound {

// Target set U of aggregate values. The families require that their neutral
// aggregate (empty sum / empty product / identity) is NOT in U, so membership
// of the empty site set is always false.
template <class T>
class TargetSet {
 public:
  enum class Kind { Interval, Points, Predicate };

  // Closed interval [lo, hi]; use infinities for one-sided targets.
  static TargetSet interval(double lo, double hi) {
    static_assert(std::is_same_v<T, double>, "interval targets are for double aggregates");
    if (!(lo <= hi)) throw std::invalid_argument("target interval: lo must be <= hi");
    TargetSet u;
    u.kind_ = Kind::Interval;
    u.lo_ = lo;
    u.hi_ = hi;
    return u;
  }

  static TargetSet at_least(double lo) {
    return interval(lo, std::numeric_limits<double>::infinity());
  }

  static TargetSet points(std::vector<T> vals) {
    if (vals.empty()) throw std::invalid_argument("target point set: empty");
    TargetSet u;
    u.kind_ = Kind::Points;
    u.points_ = std::move(vals);
    return u;
  }

  static TargetSet predicate(std::function<bool(const T&)> pred, std::string label) {
    if (!pred) throw std::invalid_argument("target predicate: empty function");
    TargetSet u;
    u.kind_ = Kind::Predicate;
    u.pred_ = std::move(pred);
    u.label_ = std::move(label);
    return u;
  }

  bool contains(const T& v) const {
    switch (kind_) {
      case Kind::Interval:
        if constexpr (std::is_same_v<T, double>) return lo_ <= v && v <= hi_;
        break;
      case Kind::Points:
        for (const auto& p : points_)
          if (p == v) return true;
        return false;
      case Kind::Predicate:
        return pred_(v);
    }
    throw std::logic_error("target kind unsupported for this value type");
  }

  std::string describe() const {
    char buf[96];
    switch (kind_) {
      case Kind::Interval:
        std::snprintf(buf, sizeof buf, "[%g,%g]", lo_, hi_);
        return buf;
      case Kind::Points: {
        if constexpr (std::is_same_v<T, double>) {
          std::string s = "{";
          for (size_t i = 0; i < points_.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%s%g", i ? "," : "", points_[i]);
            s += buf;
          }
          return s + "}";
        } else {
          std::snprintf(buf, sizeof buf, "{%zu points}", points_.size());
          return buf;
        }
      }
      case Kind::Predicate:
        return label_;
    }
    return "?";
  }

 private:
  Kind kind_ = Kind::Points;
  double lo_ = 0.0, hi_ = 0.0;
  std::vector<T> points_;
  std::function<bool(const T&)> pred_;
  std::string label_;
};

namespace detail {

template <class T>
std::vector<int32_t> resolve_indices(const SiteSet& support, const SiteSet& sites) {
  std::vector<int32_t> idx;
  idx.reserve(sites.size());
  for (const auto& p : sites) {
    const std::ptrdiff_t i = support.index_of(p);
    if (i < 0) throw SupportError("sample does not cover site " + fieldbound::to_string(p));
    idx.push_back(static_cast<int32_t>(i));
  }
  return idx;
}

}  // namespace detail

// The families below expose two surfaces: site-set membership on a FieldSample
// (convenience, resolves indices per call) and raw index spans into a value
// buffer (hot paths resolve once). member of the empty set is always false.

// A_T = {sum of Z_t over T lies in U}, requires 0 not in U.
template <class T>
class SumFamily {
 public:
  explicit SumFamily(TargetSet<T> target, T zero = T{})
      : target_(std::move(target)), zero_(std::move(zero)) {
    if (target_.contains(zero_))
      throw std::invalid_argument("sum family: target must exclude the zero aggregate");
  }

  bool member_idx(const T* vals, const int32_t* idx, size_t n) const {
    T acc = zero_;
    for (size_t i = 0; i < n; ++i) acc = acc + vals[idx[i]];
    return target_.contains(acc);
  }
  bool covered_idx(const T* vals, int32_t i) const { return !(vals[i] == zero_); }

  bool member(const FieldSample<T>& s, const SiteSet& sites) const {
    auto idx = detail::resolve_indices<T>(s.support, sites);
    return member_idx(s.values.data(), idx.data(), idx.size());
  }
  bool covered(const FieldSample<T>& s, const SitePoint& t) const {
    const std::ptrdiff_t i = s.support.index_of(t);
    if (i < 0) throw SupportError("sample does not cover site " + fieldbound::to_string(t));
    return covered_idx(s.values.data(), static_cast<int32_t>(i));
  }
  std::string name() const { return "sum" + target_.describe(); }
  const TargetSet<T>& target() const { return target_; }
  const T& zero() const { return zero_; }

 private:
  TargetSet<T> target_;
  T zero_;
};

// A_T = union of per-site cover events {pred(Z_t)}.
template <class T>
class UnionFamily {
 public:
  UnionFamily(std::function<bool(const T&)> cover, std::string label)
      : cover_(std::move(cover)), label_(std::move(label)) {
    if (!cover_) throw std::invalid_argument("union family: empty cover predicate");
  }
  explicit UnionFamily(TargetSet<T> per_site)
      : label_("union" + per_site.describe()) {
    cover_ = [u = std::move(per_site)](const T& v) { return u.contains(v); };
  }

  bool member_idx(const T* vals, const int32_t* idx, size_t n) const {
    for (size_t i = 0; i < n; ++i)
      if (cover_(vals[idx[i]])) return true;
    return false;
  }
  bool covered_idx(const T* vals, int32_t i) const { return cover_(vals[i]); }

  bool member(const FieldSample<T>& s, const SiteSet& sites) const {
    auto idx = detail::resolve_indices<T>(s.support, sites);
    return member_idx(s.values.data(), idx.data(), idx.size());
  }
  bool covered(const FieldSample<T>& s, const SitePoint& t) const {
    const std::ptrdiff_t i = s.support.index_of(t);
    if (i < 0) throw SupportError("sample does not cover site " + fieldbound::to_string(t));
    return covered_idx(s.values.data(), static_cast<int32_t>(i));
  }
  std::string name() const { return label_; }

 private:
  std::function<bool(const T&)> cover_;
  std::string label_;
};

// Exceedance of a level by the maximum is the union of per-site exceedances.
inline UnionFamily<double> max_family(double level) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "max(>%g)", level);
  return UnionFamily<double>([level](const double& v) { return v > level; }, buf);
}

// A_T = {product of Z_t over T lies in U}, requires 1 not in U.
template <class T>
class ProductFamily {
 public:
  explicit ProductFamily(TargetSet<T> target, T one = T(1))
      : target_(std::move(target)), one_(std::move(one)) {
    if (target_.contains(one_))
      throw std::invalid_argument("product family: target must exclude the unit aggregate");
  }

  bool member_idx(const T* vals, const int32_t* idx, size_t n) const {
    T acc = one_;
    for (size_t i = 0; i < n; ++i) acc = acc * vals[idx[i]];
    return target_.contains(acc);
  }
  bool covered_idx(const T* vals, int32_t i) const { return !(vals[i] == one_); }

  bool member(const FieldSample<T>& s, const SiteSet& sites) const {
    auto idx = detail::resolve_indices<T>(s.support, sites);
    return member_idx(s.values.data(), idx.data(), idx.size());
  }
  bool covered(const FieldSample<T>& s, const SitePoint& t) const {
    const std::ptrdiff_t i = s.support.index_of(t);
    if (i < 0) throw SupportError("sample does not cover site " + fieldbound::to_string(t));
    return covered_idx(s.values.data(), static_cast<int32_t>(i));
  }
  std::string name() const { return "product" + target_.describe(); }

 private:
  TargetSet<T> target_;
  T one_;
};

enum class SiteOrder { LexAscending, LexDescending };

// A_T = {ordered product of Z_t over T lies in U} for a possibly non-commutative
// multiplication; sites multiply in the fixed lattice order. Requires the
// identity not in U.
template <class T>
class SemigroupFamily {
 public:
  SemigroupFamily(TargetSet<T> target, T identity, SiteOrder order = SiteOrder::LexAscending)
      : target_(std::move(target)), id_(std::move(identity)), order_(order) {
    if (target_.contains(id_))
      throw std::invalid_argument("semigroup family: target must exclude the identity");
  }

  bool member_idx(const T* vals, const int32_t* idx, size_t n) const {
    T acc = id_;
    if (order_ == SiteOrder::LexAscending) {
      for (size_t i = 0; i < n; ++i) acc = acc * vals[idx[i]];
    } else {
      for (size_t i = n; i-- > 0;) acc = acc * vals[idx[i]];
    }
    return target_.contains(acc);
  }
  bool covered_idx(const T* vals, int32_t i) const { return !(vals[i] == id_); }

  bool member(const FieldSample<T>& s, const SiteSet& sites) const {
    auto idx = detail::resolve_indices<T>(s.support, sites);
    return member_idx(s.values.data(), idx.data(), idx.size());
  }
  bool covered(const FieldSample<T>& s, const SitePoint& t) const {
    const std::ptrdiff_t i = s.support.index_of(t);
    if (i < 0) throw SupportError("sample does not cover site " + fieldbound::to_string(t));
    return covered_idx(s.values.data(), static_cast<int32_t>(i));
  }
  std::string name() const { return "semigroup" + target_.describe(); }

 private:
  TargetSet<T> target_;
  T id_;
  SiteOrder order_;
};

// Type-erased family for configuration-driven call sites.
template <class T>
class AnyFamily {
 public:
  template <class F>
  explicit AnyFamily(F fam) : impl_(std::make_shared<Model<F>>(std::move(fam))) {}

  bool member_idx(const T* vals, const int32_t* idx, size_t n) const {
    return impl_->member_idx(vals, idx, n);
  }
  bool covered_idx(const T* vals, int32_t i) const { return impl_->covered_idx(vals, i); }
  bool member(const FieldSample<T>& s, const SiteSet& sites) const {
    return impl_->member(s, sites);
  }
  bool covered(const FieldSample<T>& s, const SitePoint& t) const {
    return impl_->covered(s, t);
  }
  std::string name() const { return impl_->name(); }

 private:
  struct Concept {
    virtual ~Concept() = default;
    virtual bool member_idx(const T*, const int32_t*, size_t) const = 0;
    virtual bool covered_idx(const T*, int32_t) const = 0;
    virtual bool member(const FieldSample<T>&, const SiteSet&) const = 0;
    virtual bool covered(const FieldSample<T>&, const SitePoint&) const = 0;
    virtual std::string name() const = 0;
  };
  template <class F>
  struct Model : Concept {
    explicit Model(F f) : fam(std::move(f)) {}
    bool member_idx(const T* v, const int32_t* i, size_t n) const override {
      return fam.member_idx(v, i, n);
    }
    bool covered_idx(const T* v, int32_t i) const override { return fam.covered_idx(v, i); }
    bool member(const FieldSample<T>& s, const SiteSet& t) const override {
      return fam.member(s, t);
    }
    bool covered(const FieldSample<T>& s, const SitePoint& p) const override {
      return fam.covered(s, p);
    }
    std::string name() const override { return fam.name(); }
    F fam;
  };
  std::shared_ptr<const Concept> impl_;
};

// Checks the two complete-cover laws on one sample:
//   A_T implies some covered site in T, and
//   a membership difference between T1 and T2 implies a covered site in their
//   symmetric difference.
// Both are evaluated; T1 and T2 double as the (T, empty) instances.
template <class T, class Family>
bool check_cover(const Family& fam, const FieldSample<T>& s, const SiteSet& t1,
                 const SiteSet& t2) {
  auto covered_somewhere = [&](const std::vector<SitePoint>& pts) {
    for (const auto& p : pts)
      if (fam.covered(s, p)) return true;
    return false;
  };
  const bool m1 = fam.member(s, t1);
  const bool m2 = fam.member(s, t2);
  if (m1 && !covered_somewhere({t1.begin(), t1.end()})) return false;
  if (m2 && !covered_somewhere({t2.begin(), t2.end()})) return false;
  if (m1 != m2) {
    std::vector<SitePoint> sym;
    for (const auto& p : t1)
      if (!t2.contains(p)) sym.push_back(p);
    for (const auto& p : t2)
      if (!t1.contains(p)) sym.push_back(p);
    if (!covered_somewhere(sym)) return false;
  }
  return true;
}

}  // namespace fieldbound
