#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <unordered_map>

#include "gqw/cas/expr.hpp"
#include "gqw/errors.hpp"

namespace gqw {

using Complex = std::complex<double>;

/// Numeric bindings for evaluation. hbar is bound here, never in the tree.
struct Bindings {
  std::unordered_map<std::string, Complex> values;
  double hbar = 1.0;

  Bindings& set(const std::string& name, Complex v) {
    values[name] = v;
    return *this;
  }
};

namespace detail {

inline Complex checked(Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw EvalError("non-finite value during evaluation");
  return z;
}

inline Complex ipow(Complex b, std::int64_t n) {
  if (n < 0) {
    if (b == Complex(0.0, 0.0)) throw EvalError("division by zero");
    return Complex(1.0, 0.0) / ipow(b, -n);
  }
  Complex r(1.0, 0.0);
  while (n > 0) {
    if (n & 1) r *= b;
    n >>= 1;
    if (n > 0) b *= b;
  }
  return r;
}

}  // namespace detail

/// Evaluates over complex doubles. Throws EvalError at poles, at unbound
/// symbols and for fractional powers of negative reals.
inline Complex evaluate(const Expr& e, const Bindings& b) {
  switch (e.kind()) {
    case Kind::Number:
      return {e.value().to_double(), 0.0};
    case Kind::Constant:
      switch (e.constant()) {
        case Constant::Pi: return {std::numbers::pi, 0.0};
        case Constant::I: return {0.0, 1.0};
        case Constant::Hbar: return {b.hbar, 0.0};
      }
      break;
    case Kind::Symbol: {
      auto it = b.values.find(e.name());
      if (it == b.values.end()) throw EvalError("unbound symbol '" + e.name() + "'");
      return it->second;
    }
    case Kind::Add: {
      Complex s(0.0, 0.0);
      for (const auto& t : e.args()) s += evaluate(t, b);
      return detail::checked(s);
    }
    case Kind::Mul: {
      Complex s(1.0, 0.0);
      for (const auto& t : e.args()) s *= evaluate(t, b);
      return detail::checked(s);
    }
    case Kind::Pow: {
      Complex base = evaluate(e.base(), b);
      const Rational& n = e.exponent();
      if (n.is_integer()) return detail::checked(detail::ipow(base, n.num()));
      if (base == Complex(0.0, 0.0)) {
        if (n.is_negative()) throw EvalError("division by zero");
        return {0.0, 0.0};
      }
      if (base.imag() == 0.0 && base.real() < 0.0)
        throw EvalError("fractional power of a negative number");
      return detail::checked(std::pow(base, n.to_double()));
    }
    case Kind::Func: {
      Complex a = evaluate(e.arg(), b);
      switch (e.func()) {
        case Func::Sin: return detail::checked(std::sin(a));
        case Func::Cos: return detail::checked(std::cos(a));
        case Func::Exp: return detail::checked(std::exp(a));
      }
    }
  }
  throw EvalError("malformed expression");
}

}  // namespace gqw
