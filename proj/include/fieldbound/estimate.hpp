#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "fieldbound/errors.hpp"
#include "fieldbound/fields.hpp"
#include "fieldbound/rng.hpp"

namespace fieldbound {

struct MeanEstimate {
  double point = 0.0;
  double half_width = 0.0;  // 0 for the exact backend
  uint64_t n = 0;
};

// Probability estimate; the interval accessors clip to [0,1] for reporting.
struct ProbEstimate {
  double point = 0.0;
  double half_width = 0.0;
  uint64_t n = 0;
  double lo() const { return std::max(0.0, point - half_width); }
  double hi() const { return std::min(1.0, point + half_width); }
};

namespace detail {

// Neumaier compensated sum: accumulation error independent of term count,
// which keeps exact-backend identities inside 1e-12 over millions of outcomes.
struct Neumaier {
  double s = 0.0, c = 0.0;
  void add(double x) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  double get() const { return s + c; }
};

}  // namespace detail

struct ExactOptions {
  uint64_t cap = kDefaultEnumerationCap;
  int threads = 0;  // 0: hardware concurrency
};

struct McOptions {
  uint64_t n_samples = 0;
  uint64_t seed = 0;
  double confidence = 0.99;
  int threads = 0;
};

// Reduces a function of the field over the window's law, either by exact
// enumeration (weights are outcome probabilities) or by Monte Carlo sampling
// (unit weights, normal-approximation intervals).
//
// Reduction is chunked with a fixed chunk size and partials are folded in
// chunk order, so results are bit-identical for any thread count.
template <class T>
class Estimator {
 public:
  using SampleFn = std::function<double(const FieldSample<T>&)>;
  using PredFn = std::function<bool(const FieldSample<T>&)>;

  static Estimator exact(const FieldModel<T>& model, const SiteSet& win, ExactOptions opt = {}) {
    Estimator e;
    e.exact_ = true;
    e.window_ = win;
    e.threads_ = opt.threads;
    e.enum_plan_ = std::make_shared<EnumerationPlan<T>>(model, win, opt.cap);
    e.draws_ = e.enum_plan_->outcome_count();
    e.model_desc_ = model.describe();
    return e;
  }

  static Estimator monte_carlo(const FieldModel<T>& model, const SiteSet& win, McOptions opt) {
    if (opt.n_samples < 1) throw std::invalid_argument("monte carlo: n_samples must be >= 1");
    if (!(opt.confidence > 0.0 && opt.confidence < 1.0))
      throw std::invalid_argument("monte carlo: confidence must be in (0,1)");
    Estimator e;
    e.exact_ = false;
    e.window_ = win;
    e.threads_ = opt.threads;
    e.sample_plan_ = std::make_shared<SamplePlan<T>>(model, win);
    e.draws_ = opt.n_samples;
    e.seed_ = opt.seed;
    e.confidence_ = opt.confidence;
    e.z_ = rng::two_sided_z(opt.confidence);
    e.model_desc_ = model.describe();
    return e;
  }

  const SiteSet& window() const { return window_; }
  bool is_exact() const { return exact_; }
  uint64_t draws() const { return draws_; }
  uint64_t seed() const { return seed_; }
  double confidence() const { return confidence_; }
  double z() const { return z_; }

  std::string describe() const {
    char buf[96];
    if (exact_)
      std::snprintf(buf, sizeof buf, "exact[outcomes=%llu]",
                    static_cast<unsigned long long>(draws_));
    else
      std::snprintf(buf, sizeof buf, "mc[samples=%llu,seed=%llu,conf=%g]",
                    static_cast<unsigned long long>(draws_),
                    static_cast<unsigned long long>(seed_), confidence_);
    return buf;
  }
  const std::string& model_description() const { return model_desc_; }

  // Acc must provide accumulate(const std::vector<T>& values, double weight)
  // and merge(const Acc&). values are aligned with window().points().
  template <class Acc>
  Acc reduce(Acc proto) const {
    const uint64_t chunk = uint64_t{1} << 16;
    const uint64_t nchunks = (draws_ + chunk - 1) / chunk;
    int workers = threads_ > 0 ? threads_ : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    if (static_cast<uint64_t>(workers) > nchunks) workers = static_cast<int>(nchunks);

    std::vector<Acc> parts(static_cast<size_t>(nchunks), proto);
    auto run_chunk = [&](uint64_t c) {
      const uint64_t b = c * chunk;
      const uint64_t e = std::min(draws_, b + chunk);
      Acc& acc = parts[static_cast<size_t>(c)];
      if (exact_) {
        typename EnumerationPlan<T>::Cursor cur;
        enum_plan_->seek(cur, b);
        for (uint64_t i = b; i < e; ++i) {
          acc.accumulate(enum_plan_->field(cur), enum_plan_->probability(cur));
          enum_plan_->advance(cur);
        }
      } else {
        std::vector<T> vals, scratch;
        for (uint64_t i = b; i < e; ++i) {
          sample_plan_->sample_into(vals, scratch, seed_, i);
          acc.accumulate(vals, 1.0);
        }
      }
    };

    if (workers == 1) {
      for (uint64_t c = 0; c < nchunks; ++c) run_chunk(c);
    } else {
      std::atomic<uint64_t> next{0};
      std::exception_ptr err;
      std::mutex err_mu;
      std::vector<std::thread> pool;
      pool.reserve(static_cast<size_t>(workers));
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          try {
            for (;;) {
              const uint64_t c = next.fetch_add(1);
              if (c >= nchunks) return;
              run_chunk(c);
            }
          } catch (...) {
            std::lock_guard<std::mutex> lk(err_mu);
            if (!err) err = std::current_exception();
          }
        });
      }
      for (auto& th : pool) th.join();
      if (err) std::rethrow_exception(err);
    }

    Acc out = std::move(parts[0]);
    for (uint64_t c = 1; c < nchunks; ++c) out.merge(parts[static_cast<size_t>(c)]);
    return out;
  }

  std::vector<MeanEstimate> joint_mean(const std::vector<SampleFn>& fns) const {
    FnAcc acc = reduce(FnAcc(this, &fns));
    std::vector<MeanEstimate> out(fns.size());
    for (size_t i = 0; i < fns.size(); ++i) out[i] = finalize_mean(acc, i);
    return out;
  }

  MeanEstimate mean(const SampleFn& fn) const { return joint_mean({fn})[0]; }

  std::vector<ProbEstimate> joint_prob(const std::vector<PredFn>& preds) const {
    std::vector<SampleFn> fns;
    fns.reserve(preds.size());
    for (const auto& p : preds)
      fns.push_back([&p](const FieldSample<T>& s) { return p(s) ? 1.0 : 0.0; });
    FnAcc acc = reduce(FnAcc(this, &fns));
    std::vector<ProbEstimate> out(preds.size());
    for (size_t i = 0; i < preds.size(); ++i) {
      const MeanEstimate m = finalize_mean(acc, i);
      ProbEstimate p{m.point, m.half_width, m.n};
      if (!exact_) {
        // rule-of-three floor for degenerate counts
        const auto count = static_cast<uint64_t>(std::llround(acc.sum[i].get()));
        if (count == 0 || count == draws_)
          p.half_width = std::max(p.half_width, 3.0 / static_cast<double>(draws_));
      }
      out[i] = p;
    }
    return out;
  }

  ProbEstimate prob(const PredFn& pred) const { return joint_prob({pred})[0]; }

  // Finalize one accumulated slot into a mean estimate.
  MeanEstimate finalize_slot(const detail::Neumaier& sum, const detail::Neumaier& sumsq) const {
    MeanEstimate m;
    m.n = draws_;
    if (exact_) {
      m.point = sum.get();
      m.half_width = 0.0;
      return m;
    }
    const double n = static_cast<double>(draws_);
    m.point = sum.get() / n;
    double var = 0.0;
    if (draws_ > 1) var = std::max(0.0, (sumsq.get() - n * m.point * m.point) / (n - 1.0));
    m.half_width = z_ * std::sqrt(var / n);
    return m;
  }

 private:
  struct FnAcc {
    const Estimator* est;
    const std::vector<SampleFn>* fns;
    FieldSample<T> scratch;
    std::vector<detail::Neumaier> sum, sumsq;
    FnAcc(const Estimator* e, const std::vector<SampleFn>* f)
        : est(e), fns(f), sum(f->size()), sumsq(f->size()) {
      scratch.support = e->window_;
    }
    void accumulate(const std::vector<T>& vals, double w) {
      scratch.values = vals;
      for (size_t i = 0; i < fns->size(); ++i) {
        const double f = (*fns)[i](scratch);
        sum[i].add(w * f);
        sumsq[i].add(w * f * f);
      }
    }
    void merge(const FnAcc& o) {
      for (size_t i = 0; i < sum.size(); ++i) {
        sum[i].add(o.sum[i].get());
        sumsq[i].add(o.sumsq[i].get());
      }
    }
  };

  MeanEstimate finalize_mean(const FnAcc& acc, size_t i) const {
    return finalize_slot(acc.sum[i], acc.sumsq[i]);
  }

  bool exact_ = true;
  SiteSet window_;
  std::shared_ptr<EnumerationPlan<T>> enum_plan_;
  std::shared_ptr<SamplePlan<T>> sample_plan_;
  uint64_t draws_ = 0;
  uint64_t seed_ = 0;
  double confidence_ = 0.99;
  double z_ = 0.0;
  int threads_ = 0;
  std::string model_desc_;
};

}  // namespace fieldbound
