#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>

#include "gqw/errors.hpp"

namespace gqw {

/// Exact rational with 64-bit numerator and denominator.
///
/// Always normalized: gcd(num, den) == 1 and den > 0. Every arithmetic
/// operation is carried out in 128 bits and throws OverflowError when the
/// reduced result does not fit back into 64 bits.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num_(n) {}  // NOLINT(implicit)
  Rational(std::int64_t n, std::int64_t d) { *this = make(n, d); }

  [[nodiscard]] constexpr std::int64_t num() const noexcept { return num_; }
  [[nodiscard]] constexpr std::int64_t den() const noexcept { return den_; }

  [[nodiscard]] constexpr bool is_zero() const noexcept { return num_ == 0; }
  [[nodiscard]] constexpr bool is_one() const noexcept { return num_ == 1 && den_ == 1; }
  [[nodiscard]] constexpr bool is_integer() const noexcept { return den_ == 1; }
  [[nodiscard]] constexpr bool is_negative() const noexcept { return num_ < 0; }
  [[nodiscard]] double to_double() const noexcept {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    __int128 n = static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_;
    __int128 d = static_cast<__int128>(a.den_) * b.den_;
    return reduce(n, d);
  }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    __int128 n = static_cast<__int128>(a.num_) * b.num_;
    __int128 d = static_cast<__int128>(a.den_) * b.den_;
    return reduce(n, d);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.is_zero()) throw EvalError("rational division by zero");
    __int128 n = static_cast<__int128>(a.num_) * b.den_;
    __int128 d = static_cast<__int128>(a.den_) * b.num_;
    return reduce(n, d);
  }
  Rational operator-() const {
    if (num_ == INT64_MIN) throw OverflowError("rational negation overflow");
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    __int128 l = static_cast<__int128>(a.num_) * b.den_;
    __int128 r = static_cast<__int128>(b.num_) * a.den_;
    return l <=> r;
  }

  /// Integer power; negative exponents invert.
  [[nodiscard]] Rational pow(std::int64_t e) const {
    if (e < 0) {
      if (is_zero()) throw EvalError("zero raised to a negative power");
      return Rational(1) / pow(-e);
    }
    Rational result(1);
    Rational base = *this;
    while (e > 0) {
      if (e & 1) result *= base;
      e >>= 1;
      if (e > 0) base *= base;
    }
    return result;
  }

  /// Exact k-th root when one exists (k >= 1).
  [[nodiscard]] std::optional<Rational> exact_root(std::int64_t k) const {
    if (k == 1) return *this;
    if (num_ < 0 && k % 2 == 0) return std::nullopt;
    auto n = int_root(num_ < 0 ? -num_ : num_, k);
    auto d = int_root(den_, k);
    if (!n || !d) return std::nullopt;
    return Rational(num_ < 0 ? -*n : *n, *d);
  }

  [[nodiscard]] std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  static Rational make(std::int64_t n, std::int64_t d) {
    if (d == 0) throw EvalError("rational with zero denominator");
    return reduce(n, d);
  }

  static Rational reduce(__int128 n, __int128 d) {
    if (d == 0) throw EvalError("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 a = n < 0 ? -n : n;
    __int128 b = d;
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      n /= a;
      d /= a;
    }
    if (n > INT64_MAX || n < -INT64_MAX || d > INT64_MAX)
      throw OverflowError("rational arithmetic overflow");
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }

  static std::optional<std::int64_t> int_root(std::int64_t v, std::int64_t k) {
    if (v == 0 || v == 1) return v;
    auto guess = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(v), 1.0 / k)));
    for (std::int64_t c = std::max<std::int64_t>(guess - 1, 0); c <= guess + 1; ++c) {
      __int128 p = 1;
      bool over = false;
      for (std::int64_t i = 0; i < k; ++i) {
        p *= c;
        if (p > v) {
          over = true;
          break;
        }
      }
      if (!over && p == v) return c;
    }
    return std::nullopt;
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace gqw
