#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gqw/cas/calculus.hpp"
#include "gqw/cas/eval.hpp"
#include "gqw/cas/expr.hpp"
#include "gqw/errors.hpp"

namespace gqw {

struct Interval {
  double lo = -2.0;
  double hi = 2.0;
};

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform,
/// unlike std::uniform_real_distribution.
template <typename Rng>
double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Deterministic random points of a chart domain.
///
/// The domain is a bounding box intersected with strict inequalities
/// `g > 0`. Emitted points satisfy `g > margin` with margin > tolerance, so
/// every point is strictly inside the domain.
class DomainSampler {
 public:
  DomainSampler() = default;
  DomainSampler(std::vector<std::string> coordinates, std::vector<Interval> box,
                std::vector<Expr> positive = {}, std::uint64_t seed = 42, int samples = 32,
                double tolerance = 1e-9)
      : coordinates_(std::move(coordinates)),
        box_(std::move(box)),
        positive_(std::move(positive)),
        seed_(seed),
        samples_(samples),
        tolerance_(tolerance) {
    if (box_.size() != coordinates_.size())
      throw ValidationError("sampler box does not match the coordinate count");
    if (samples_ <= 0) throw ValidationError("sample count must be positive");
    margin_ = std::max(margin_, 10.0 * tolerance_);
  }

  [[nodiscard]] const std::vector<std::string>& coordinates() const { return coordinates_; }
  [[nodiscard]] const std::vector<Interval>& box() const { return box_; }
  [[nodiscard]] const std::vector<Expr>& inequalities() const { return positive_; }
  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] int samples() const { return samples_; }
  [[nodiscard]] double tolerance() const { return tolerance_; }
  [[nodiscard]] double margin() const { return margin_; }
  [[nodiscard]] double hbar() const { return hbar_; }

  // Builders return modified copies.
  [[nodiscard]] DomainSampler with_hbar(double h) const {
    if (!(h > 0.0)) throw ValidationError("hbar must be positive");
    DomainSampler s = *this;
    s.hbar_ = h;
    return s;
  }
  [[nodiscard]] DomainSampler with_seed(std::uint64_t seed) const {
    DomainSampler s = *this;
    s.seed_ = seed;
    return s;
  }
  [[nodiscard]] DomainSampler with_samples(int n) const {
    if (n <= 0) throw ValidationError("sample count must be positive");
    DomainSampler s = *this;
    s.samples_ = n;
    return s;
  }
  [[nodiscard]] DomainSampler with_tolerance(double t) const {
    DomainSampler s = *this;
    s.tolerance_ = t;
    s.margin_ = std::max(1e-6, 10.0 * t);
    return s;
  }

  /// Copy with an extra free coordinate (e.g. fiber variables).
  [[nodiscard]] DomainSampler extended(const std::string& name, Interval range) const {
    DomainSampler s = *this;
    s.coordinates_.push_back(name);
    s.box_.push_back(range);
    return s;
  }

  /// One point inside the domain drawn from `rng`.
  template <typename Rng>
  Bindings draw(Rng& rng) const {
    for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
      Bindings b;
      b.hbar = hbar_;
      for (std::size_t k = 0; k < coordinates_.size(); ++k) {
        const double u = uniform01(rng);
        b.values[coordinates_[k]] = {box_[k].lo + u * (box_[k].hi - box_[k].lo), 0.0};
      }
      if (inside(b)) return b;
    }
    throw ValidationError("domain sampler is empty: no point satisfies the inequalities");
  }

  [[nodiscard]] bool inside(const Bindings& b) const {
    for (const auto& g : positive_) {
      Complex v;
      try {
        v = evaluate(g, b);
      } catch (const EvalError&) {
        return false;
      }
      if (!(v.real() > margin_)) return false;
    }
    return true;
  }

  /// The N points used by every equality check, deterministic in the seed.
  [[nodiscard]] std::vector<Bindings> points() const {
    std::mt19937_64 rng(seed_);
    std::vector<Bindings> out;
    out.reserve(static_cast<std::size_t>(samples_));
    for (int k = 0; k < samples_; ++k) out.push_back(draw(rng));
    return out;
  }

  static constexpr int kMaxRejections = 10000;
  static constexpr int kMaxResamples = 64;

 private:
  std::vector<std::string> coordinates_;
  std::vector<Interval> box_;
  std::vector<Expr> positive_;
  std::uint64_t seed_ = 42;
  int samples_ = 32;
  double tolerance_ = 1e-9;
  double margin_ = 1e-6;
  double hbar_ = 1.0;
};

struct EqualityResult {
  bool equal = true;
  double residual = 0.0;
  int n_samples = 0;
  bool structural = true;  // every difference canonicalized to exactly zero

  EqualityResult& merge(const EqualityResult& o) {
    equal = equal && o.equal;
    residual = std::max(residual, o.residual);
    n_samples = std::max(n_samples, o.n_samples);
    structural = structural && o.structural;
    return *this;
  }
};

/// Worst |e| over the sampler's points. Points where `e` cannot be evaluated
/// are redrawn, up to kMaxResamples times per point.
inline EqualityResult max_abs(const Expr& e, const DomainSampler& s) {
  EqualityResult r;
  r.n_samples = s.samples();
  if (e.is_zero()) {
    r.structural = true;
    return r;
  }
  for (const auto& v : free_symbols(e)) {
    if (std::find(s.coordinates().begin(), s.coordinates().end(), v) == s.coordinates().end())
      throw ValidationError("symbol '" + v + "' is not a sampler coordinate");
  }
  r.structural = false;
  std::mt19937_64 rng(s.seed());
  for (int k = 0; k < s.samples(); ++k) {
    bool done = false;
    for (int attempt = 0; attempt <= DomainSampler::kMaxResamples && !done; ++attempt) {
      Bindings b = s.draw(rng);
      try {
        r.residual = std::max(r.residual, std::abs(evaluate(e, b)));
        done = true;
      } catch (const EvalError&) {
      }
    }
    if (!done) throw NumericError("expression could not be evaluated near sample " + std::to_string(k));
  }
  r.equal = r.residual <= s.tolerance();
  return r;
}

/// Canonical simplification plus randomized sampling.
inline EqualityResult expr_equal(const Expr& a, const Expr& b, const DomainSampler& s) {
  return max_abs(a - b, s);
}

}  // namespace gqw
